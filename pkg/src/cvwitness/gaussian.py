"""Zero-mean Gaussian states as covariance matrices.

Conventions used throughout the package:

* quadratures are interleaved, ``(x1, p1, x2, p2, ..., xN, pN)``;
* ``[x_l, p_k] = i delta_lk / 2``, so the vacuum covariance is ``I / 4``;
* modes are labelled ``1..N`` in every public signature.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionError, DomainError
from .linalg import symmetric_eigensystem, symmetric_sqrt

VACUUM_VARIANCE = 0.25
PHYSICAL_TOL = 1e-9
SYMPLECTIC_TOL = 1e-9
ORDERING = "x1p1..."
HBAR = 0.5


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _check_modes(modes: Iterable[int], n_modes: int) -> tuple[int, ...]:
    modes = tuple(sorted(set(int(m) for m in modes)))
    for m in modes:
        if not 1 <= m <= n_modes:
            raise DimensionError(f"mode {m} out of range 1..{n_modes}")
    return modes


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Symmetrized second-moment matrix of an ``n_modes``-mode Gaussian state.

    The constructor symmetrizes its input and stores a read-only copy.
    """

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2 or m.shape[0] == 0:
            raise DimensionError(f"covariance matrix must be 2N x 2N, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise DomainError("covariance matrix has non-finite entries")
        object.__setattr__(self, "entries", _frozen(0.5 * (m + m.T)))

    @property
    def n_modes(self) -> int:
        return self.entries.shape[0] // 2

    @classmethod
    def vacuum(cls, n_modes: int) -> "CovarianceMatrix":
        if n_modes < 1:
            raise DimensionError("n_modes must be positive")
        return cls(VACUUM_VARIANCE * np.eye(2 * n_modes))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CovarianceMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(
            np.array_equal(self.entries, other.entries)
        )

    def __hash__(self):
        return hash(self.entries.tobytes())

    def allclose(self, other: "CovarianceMatrix", atol: float = 1e-10) -> bool:
        return self.entries.shape == other.entries.shape and bool(
            np.allclose(self.entries, other.entries, rtol=0.0, atol=atol)
        )

    def permute_modes(self, order: Iterable[int]) -> "CovarianceMatrix":
        """Relabel modes: new mode ``k`` is old mode ``order[k-1]``."""
        order = [int(m) for m in order]
        if sorted(order) != list(range(1, self.n_modes + 1)):
            raise DimensionError(f"{order} is not a permutation of 1..{self.n_modes}")
        idx = np.array([[2 * (m - 1), 2 * (m - 1) + 1] for m in order]).ravel()
        return CovarianceMatrix(self.entries[np.ix_(idx, idx)])

    def to_dict(self) -> dict:
        return {
            "n_modes": self.n_modes,
            "ordering": ORDERING,
            "hbar_convention": HBAR,
            "entries": [float(v) for v in self.entries.ravel()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CovarianceMatrix":
        if data.get("ordering") != ORDERING:
            raise DomainError(f"unsupported quadrature ordering {data.get('ordering')!r}")
        if data.get("hbar_convention") != HBAR:
            raise DomainError(f"unsupported hbar convention {data.get('hbar_convention')!r}")
        n = int(data["n_modes"])
        entries = np.asarray(data["entries"], dtype=float)
        if entries.size != 4 * n * n:
            raise DimensionError(f"expected {4 * n * n} entries for {n} modes, got {entries.size}")
        return cls(entries.reshape(2 * n, 2 * n))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "CovarianceMatrix":
        return cls.from_dict(json.loads(text))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "CovarianceMatrix":
        return cls.from_json(Path(path).read_text())


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal ``Lambda`` with ``J = [[0, 1], [-1, 0]]`` per mode."""
    if n_modes < 1:
        raise DimensionError("n_modes must be positive")
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True, eq=False)
class SymplecticTransform:
    """Linear phase-space map ``xi -> S xi`` with ``S Lambda S^T = Lambda``."""

    matrix: np.ndarray

    def __post_init__(self):
        s = np.array(self.matrix, dtype=float)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2 or s.shape[0] == 0:
            raise DimensionError(f"symplectic matrix must be 2N x 2N, got shape {s.shape}")
        object.__setattr__(self, "matrix", _frozen(s))

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    @classmethod
    def identity(cls, n_modes: int) -> "SymplecticTransform":
        return cls(np.eye(2 * n_modes))

    def symplectic_defect(self) -> float:
        """Largest entry of ``|S Lambda S^T - Lambda|``."""
        lam = symplectic_form(self.n_modes)
        return float(np.max(np.abs(self.matrix @ lam @ self.matrix.T - lam)))

    def is_symplectic(self, tol: float = SYMPLECTIC_TOL) -> bool:
        return self.symplectic_defect() <= tol

    def then(self, other: "SymplecticTransform") -> "SymplecticTransform":
        """Apply ``self`` first, then ``other``."""
        if other.n_modes != self.n_modes:
            raise DimensionError("cannot compose transforms on different mode counts")
        return SymplecticTransform(other.matrix @ self.matrix)


def squeezer(r: float, mode: int, n_modes: int) -> SymplecticTransform:
    """Single-mode squeezer ``x -> e^{-r} x, p -> e^{+r} p`` on ``mode``."""
    (mode,) = _check_modes([mode], n_modes)
    s = np.eye(2 * n_modes)
    i = 2 * (mode - 1)
    s[i, i] = math.exp(-r)
    s[i + 1, i + 1] = math.exp(r)
    return SymplecticTransform(s)


def phase_rotation(phi: float, mode: int, n_modes: int) -> SymplecticTransform:
    """Phase-space rotation of one mode by angle ``phi``."""
    (mode,) = _check_modes([mode], n_modes)
    s = np.eye(2 * n_modes)
    i = 2 * (mode - 1)
    c, sn = math.cos(phi), math.sin(phi)
    s[i : i + 2, i : i + 2] = [[c, sn], [-sn, c]]
    return SymplecticTransform(s)


def beam_splitter(theta: float, mode_i: int, mode_j: int, n_modes: int) -> SymplecticTransform:
    """Phase-free beam splitter acting identically on the x and p planes.

    Maps ``(q_i, q_j) -> (cos t q_i + sin t q_j, sin t q_i - cos t q_j)`` for
    ``q`` in ``{x, p}``.
    """
    if mode_i == mode_j:
        raise DimensionError("beam splitter needs two distinct modes")
    _check_modes([mode_i, mode_j], n_modes)
    c, sn = math.cos(theta), math.sin(theta)
    s = np.eye(2 * n_modes)
    i, j = 2 * (mode_i - 1), 2 * (mode_j - 1)
    for quad in (0, 1):
        a, b = i + quad, j + quad
        s[a, a], s[a, b] = c, sn
        s[b, a], s[b, b] = sn, -c
    return SymplecticTransform(s)


def _require_positive_definite(v: CovarianceMatrix) -> np.ndarray:
    w, _ = symmetric_eigensystem(v.entries)
    if w[0] <= 0.0:
        raise DomainError(
            f"covariance matrix is not positive definite (smallest eigenvalue {w[0]!r})"
        )
    return w


def symplectic_eigenvalues(v: CovarianceMatrix) -> np.ndarray:
    """Symplectic spectrum ``nu_1 <= ... <= nu_N`` of ``v``.

    The values are square roots of the eigenvalues of the symmetric matrix
    ``K = -V^{1/2} Lambda V Lambda V^{1/2}``, which come in degenerate pairs.

    Raises:
        DomainError: If ``v`` is not positive definite.
    """
    _require_positive_definite(v)
    lam = symplectic_form(v.n_modes)
    root = symmetric_sqrt(v.entries)
    k = -root @ lam @ v.entries @ lam @ root
    w, _ = symmetric_eigensystem(k)
    paired = 0.5 * (w[0::2] + w[1::2])
    return np.sqrt(np.clip(paired, 0.0, None))


def is_physical(v: CovarianceMatrix, tol: float = PHYSICAL_TOL) -> bool:
    """Whether ``v`` obeys ``V - (i/4) Lambda >= 0`` up to ``tol`` on the smallest symplectic eigenvalue."""
    try:
        nu = symplectic_eigenvalues(v)
    except DomainError:
        return False
    return bool(nu[0] >= VACUUM_VARIANCE - tol)


def partial_transpose(v: CovarianceMatrix, modes: Iterable[int]) -> CovarianceMatrix:
    """Flip the sign of ``p`` for every listed mode: ``Gamma V Gamma``."""
    modes = _check_modes(modes, v.n_modes)
    signs = np.ones(2 * v.n_modes)
    for m in modes:
        signs[2 * (m - 1) + 1] = -1.0
    return CovarianceMatrix(v.entries * np.outer(signs, signs))


def apply_symplectic(v: CovarianceMatrix, s: SymplecticTransform) -> CovarianceMatrix:
    """Transform ``v`` to ``S V S^T``.

    Raises:
        DimensionError: On mode-count mismatch.
        DomainError: If ``s`` violates the symplectic condition beyond 1e-9.
    """
    if s.n_modes != v.n_modes:
        raise DimensionError(f"transform acts on {s.n_modes} modes, state has {v.n_modes}")
    defect = s.symplectic_defect()
    if defect > SYMPLECTIC_TOL:
        raise DomainError(f"matrix is not symplectic (defect {defect:.3e})")
    return CovarianceMatrix(s.matrix @ v.entries @ s.matrix.T)


def direct_sum(*blocks: CovarianceMatrix) -> CovarianceMatrix:
    """Block-diagonal composition; modes of later blocks are numbered after earlier ones."""
    if not blocks:
        raise DimensionError("direct_sum needs at least one block")
    size = sum(b.entries.shape[0] for b in blocks)
    out = np.zeros((size, size))
    offset = 0
    for b in blocks:
        k = b.entries.shape[0]
        out[offset : offset + k, offset : offset + k] = b.entries
        offset += k
    return CovarianceMatrix(out)


def thermal_state(spectrum: Iterable[float]) -> CovarianceMatrix:
    """Diagonal state with per-mode symplectic eigenvalues ``nu_k >= 1/4``."""
    nu = np.asarray(list(spectrum), dtype=float)
    if np.any(nu < VACUUM_VARIANCE):
        raise DomainError("thermal symplectic eigenvalues must be at least 1/4")
    return CovarianceMatrix(np.diag(np.repeat(nu, 2)))
