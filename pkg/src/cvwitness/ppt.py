"""Partial-transpose (npt) tests and the three-mode Gaussian classification.

For a 1 x M split of a Gaussian state the npt test is necessary and
sufficient, so a three-mode state is classified by transposing one mode at a
time. Classes 4 (three-mode biseparable) and 5 (fully separable) both have
positive partial transposes on every cut and are not told apart here.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from .errors import DimensionError, DomainError
from .gaussian import (
    PHYSICAL_TOL,
    VACUUM_VARIANCE,
    CovarianceMatrix,
    is_physical,
    partial_transpose,
    symplectic_eigenvalues,
)

CLASS1 = "class1_fully_inseparable"
CLASS2 = "class2_one_mode_biseparable"
CLASS3 = "class3_two_mode_biseparable"
CLASS4OR5 = "class4or5_ppt_all_cuts"


def npt_cut(v: CovarianceMatrix, modes: Iterable[int], tol: float = PHYSICAL_TOL) -> tuple[bool, float]:
    """Transpose ``modes`` and report ``(is_npt, min symplectic eigenvalue)``.

    ``is_npt`` is true only when the eigenvalue falls below ``1/4 - tol``, so
    round-off never reads as entanglement.

    Raises:
        DomainError: If ``v`` itself is not a physical state.
    """
    if not is_physical(v, tol):
        raise DomainError("npt test requires a physical covariance matrix")
    nu_min = float(symplectic_eigenvalues(partial_transpose(v, modes))[0])
    return nu_min < VACUUM_VARIANCE - tol, nu_min


def npt_single_mode(v: CovarianceMatrix, mode: int, tol: float = PHYSICAL_TOL) -> tuple[bool, float]:
    """npt test across the cut ``{mode} | rest``."""
    if not 1 <= mode <= v.n_modes:
        raise DimensionError(f"mode {mode} out of range 1..{v.n_modes}")
    return npt_cut(v, [mode], tol)


@dataclass(frozen=True)
class TripartiteClass:
    """Class label plus the per-mode npt evidence it was derived from.

    ``ppt_modes`` lists the modes whose transposition stays physical: the
    separable mode ``k`` for class 2 and the pair ``(k, m)`` for class 3.
    """

    label: str
    npt_flags: tuple[bool, bool, bool]
    min_pt_eigenvalues: tuple[float, float, float]
    tolerance: float

    @property
    def ppt_modes(self) -> tuple[int, ...]:
        return tuple(j + 1 for j, flag in enumerate(self.npt_flags) if not flag)

    def to_dict(self) -> dict:
        return {
            "class": self.label,
            "npt": list(self.npt_flags),
            "min_pt_eigs": list(self.min_pt_eigenvalues),
            "ppt_modes": list(self.ppt_modes),
            "tolerance": self.tolerance,
        }


_LABELS = {3: CLASS1, 2: CLASS2, 1: CLASS3, 0: CLASS4OR5}


def classify_tripartite(v: CovarianceMatrix, tol: float = PHYSICAL_TOL) -> TripartiteClass:
    """Assign a physical three-mode state to class 1, 2, 3 or the joint class 4/5."""
    if v.n_modes != 3:
        raise DimensionError(f"tripartite classification needs 3 modes, got {v.n_modes}")
    results = [npt_single_mode(v, j, tol) for j in (1, 2, 3)]
    flags = tuple(r[0] for r in results)
    eigs = tuple(r[1] for r in results)
    return TripartiteClass(_LABELS[sum(flags)], flags, eigs, tol)
