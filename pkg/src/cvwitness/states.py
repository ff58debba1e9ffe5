"""Constructors for squeezed, two-mode squeezed and GHZ-type states.

The GHZ-type family is built in two independent ways: from the closed-form
correlation entries and from an explicit N-splitter acting on squeezed
vacua. The two must agree to round-off; tests enforce it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError
from .gaussian import (
    CovarianceMatrix,
    SymplecticTransform,
    apply_symplectic,
    beam_splitter,
    direct_sum,
)

Axis = Literal["x", "p"]


@dataclass(frozen=True)
class GhzFamilyParams:
    """Squeezing of the p-squeezed input (``r1``) and the x-squeezed inputs (``r2``)."""

    n_modes: int
    r1: float
    r2: float

    def __post_init__(self):
        if self.n_modes < 2:
            raise DomainError(f"GHZ-type family needs at least 2 modes, got {self.n_modes}")
        if not (math.isfinite(self.r1) and math.isfinite(self.r2)):
            raise DomainError("squeezing parameters must be finite")
        if self.r1 < 0 or self.r2 < 0:
            raise DomainError("squeezing parameters must be nonnegative")

    @classmethod
    def unbiased(cls, n_modes: int, r2: float) -> "GhzFamilyParams":
        return cls(n_modes, unbiased_r1(n_modes, r2), r2)


@dataclass(frozen=True)
class GhzCorrelationEntries:
    """x-diagonal ``a``, p-diagonal ``b``, x-off-diagonal ``c``, p-off-diagonal ``d`` (before the 1/4)."""

    a: float
    b: float
    c: float
    d: float

    @classmethod
    def from_params(cls, p: GhzFamilyParams) -> "GhzCorrelationEntries":
        n = p.n_modes
        e1p, e1m = math.exp(2 * p.r1), math.exp(-2 * p.r1)
        e2p, e2m = math.exp(2 * p.r2), math.exp(-2 * p.r2)
        return cls(
            a=e1p / n + (n - 1) * e2m / n,
            b=e1m / n + (n - 1) * e2p / n,
            c=(e1p - e2m) / n,
            d=(e1m - e2p) / n,
        )


def squeezed_vacuum(r: float, axis: Axis = "x") -> CovarianceMatrix:
    """Single-mode squeezed vacuum, squeezed along ``axis``."""
    if not math.isfinite(r):
        raise DomainError("squeezing must be finite")
    small, large = math.exp(-2 * r) / 4, math.exp(2 * r) / 4
    if axis == "x":
        return CovarianceMatrix(np.diag([small, large]))
    if axis == "p":
        return CovarianceMatrix(np.diag([large, small]))
    raise DomainError(f"axis must be 'x' or 'p', got {axis!r}")


def two_mode_squeezed(r: float) -> CovarianceMatrix:
    """EPR-type state with ``x1 - x2`` and ``p1 + p2`` squeezed."""
    if r < 0:
        raise DomainError("two-mode squeezing must be nonnegative")
    ch, sh = math.cosh(2 * r), math.sinh(2 * r)
    m = np.array(
        [
            [ch, 0.0, sh, 0.0],
            [0.0, ch, 0.0, -sh],
            [sh, 0.0, ch, 0.0],
            [0.0, -sh, 0.0, ch],
        ]
    )
    return CovarianceMatrix(m / 4)


def ghz_family_analytic(p: GhzFamilyParams) -> CovarianceMatrix:
    """GHZ-type covariance matrix from the closed-form ``a, b, c, d`` entries."""
    e = GhzCorrelationEntries.from_params(p)
    n = p.n_modes
    ones = np.ones((n, n))
    eye = np.eye(n)
    xx = e.c * ones + (e.a - e.c) * eye
    pp = e.d * ones + (e.b - e.d) * eye
    m = np.zeros((2 * n, 2 * n))
    m[0::2, 0::2] = xx
    m[1::2, 1::2] = pp
    return CovarianceMatrix(m / 4)


def n_splitter(n_modes: int) -> SymplecticTransform:
    """Cascade ``B_{12}, B_{23}, ..., B_{N-1,N}`` with ``cos(theta_k) = 1/sqrt(N-k+1)``."""
    s = SymplecticTransform.identity(n_modes)
    for k in range(1, n_modes):
        theta = math.acos(1.0 / math.sqrt(n_modes - k + 1))
        s = s.then(beam_splitter(theta, k, k + 1, n_modes))
    return s


def ghz_family_network(p: GhzFamilyParams) -> CovarianceMatrix:
    """GHZ-type state by sending squeezed vacua through the N-splitter."""
    inputs = [squeezed_vacuum(p.r1, "p")] + [squeezed_vacuum(p.r2, "x")] * (p.n_modes - 1)
    return apply_symplectic(direct_sum(*inputs), n_splitter(p.n_modes))


def unbiased_r1(n_modes: int, r2: float) -> float:
    """Squeezing of mode 1 that makes the family unbiased (``a == b``) for given ``r2``.

    Solves ``sinh(2 r1) = (N - 1) sinh(2 r2)``; this is the same root as
    ``e^{2 r1} = sqrt(1 + (N-1)^2 sinh^2 2r2) + (N-1) sinh 2r2`` and has no
    singularity at ``r2 = 0``.
    """
    if n_modes < 2:
        raise DomainError("n_modes must be at least 2")
    if r2 < 0:
        raise DomainError("r2 must be nonnegative")
    return 0.5 * math.asinh((n_modes - 1) * math.sinh(2 * r2))
