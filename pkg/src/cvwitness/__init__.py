"""Variance criteria for genuine multipartite continuous-variable entanglement.

Gaussian states are handled as covariance matrices in the interleaved
``(x1, p1, ..., xN, pN)`` ordering with vacuum variance 1/4.
"""

from .criteria import (
    CertificationReport,
    CriterionVerdict,
    ModePartition,
    QuadCombination,
    bipartitions,
    certify_genuine,
    commutator_coefficient,
    evaluate_condition,
    fitted_condition_set,
    fitted_gain,
    genuine_threshold,
    ghz_condition_set,
    ghz_condition_variance,
    optimal_gain,
    pair_condition,
    partition_bound,
    set_partitions,
    symmetric_single_condition,
    total_variance,
)
from .errors import CVWitnessError, DimensionError, DomainError, NumericError
from .gaussian import (
    CovarianceMatrix,
    SymplecticTransform,
    apply_symplectic,
    beam_splitter,
    direct_sum,
    is_physical,
    partial_transpose,
    phase_rotation,
    squeezer,
    symplectic_eigenvalues,
    symplectic_form,
    thermal_state,
)
from .homodyne import (
    EnsembleConfig,
    EstimatedVerdict,
    estimate_condition,
    run_verification,
    sample_quadratures,
)
from .linalg import symmetric_eigensystem
from .ppt import TripartiteClass, classify_tripartite, npt_cut, npt_single_mode
from .states import (
    GhzFamilyParams,
    ghz_family_analytic,
    ghz_family_network,
    squeezed_vacuum,
    two_mode_squeezed,
    unbiased_r1,
)

__version__ = "0.1.0"
