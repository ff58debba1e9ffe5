"""Test oracles and random state generators."""

import math

import numpy as np

from cvwitness.gaussian import (
    CovarianceMatrix,
    SymplecticTransform,
    apply_symplectic,
    beam_splitter,
    phase_rotation,
    squeezer,
    symplectic_form,
    thermal_state,
)


def brute_symplectic_eigenvalues(v: CovarianceMatrix) -> np.ndarray:
    """Oracle: moduli of the (purely imaginary) eigenvalues of Lambda V, one per pair."""
    lam = symplectic_form(v.n_modes)
    ev = np.linalg.eigvals(lam @ v.entries)
    nu = np.sort(np.abs(ev.imag))
    return nu[0::2]


def random_circuit(n_modes: int, rng: np.random.Generator, depth: int = 3) -> SymplecticTransform:
    """Random product of squeezers, phase rotations and beam splitters."""
    s = SymplecticTransform.identity(n_modes)
    for _ in range(depth):
        for m in range(1, n_modes + 1):
            s = s.then(squeezer(rng.uniform(-0.8, 0.8), m, n_modes))
            s = s.then(phase_rotation(rng.uniform(0, 2 * math.pi), m, n_modes))
        if n_modes > 1:
            for _ in range(n_modes):
                i, j = rng.choice(np.arange(1, n_modes + 1), size=2, replace=False)
                s = s.then(beam_splitter(rng.uniform(0, math.pi), int(i), int(j), n_modes))
    return s


def random_state(n_modes: int, rng: np.random.Generator, mixed: bool = True) -> CovarianceMatrix:
    """Random physical state S diag(nu) S^T with nu >= 1/4 (all 1/4 if pure)."""
    if mixed:
        nu = 0.25 + rng.exponential(0.3, size=n_modes)
    else:
        nu = np.full(n_modes, 0.25)
    return apply_symplectic(thermal_state(nu), random_circuit(n_modes, rng))
