"""Cyclic Jacobi eigensolver for real symmetric matrices.

Covariance matrices here are small (2N x 2N with N rarely above a few
dozen), so a plain cyclic sweep is fast enough and keeps the symplectic
spectrum computation free of general nonsymmetric eigensolvers.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, NumericError

#: Off-diagonal entries below ``OFFDIAG_RTOL * max|M|`` count as converged.
OFFDIAG_RTOL = 1e-13
MAX_SWEEPS = 100


def symmetric_eigensystem(
    matrix: np.ndarray, max_sweeps: int = MAX_SWEEPS
) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalize a real symmetric matrix with cyclic Jacobi rotations.

    Args:
        matrix: Square real symmetric array.
        max_sweeps: Sweep budget before giving up.

    Returns:
        ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and the
        matching orthonormal eigenvectors as columns, so that
        ``Q @ diag(w) @ Q.T`` reconstructs ``matrix``.

    Raises:
        DimensionError: If ``matrix`` is not square.
        NumericError: If the off-diagonal part has not vanished after
            ``max_sweeps`` sweeps.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    a = 0.5 * (a + a.T)
    q = np.eye(n)
    scale = np.max(np.abs(a)) if n else 0.0
    if n < 2 or scale == 0.0:
        return _sorted(np.diag(a).copy(), q)

    threshold = OFFDIAG_RTOL * scale
    upper = np.triu_indices(n, 1)
    for _ in range(max_sweeps):
        if np.max(np.abs(a[upper])) < threshold:
            return _sorted(np.diag(a).copy(), q)
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = a[p, r]
                if abs(apr) < threshold:
                    continue
                theta = (a[r, r] - a[p, p]) / (2.0 * apr)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                # A <- J^T A J with J the (p, r) plane rotation
                col_p = a[:, p].copy()
                col_r = a[:, r]
                a[:, p] = c * col_p - s * col_r
                a[:, r] = s * col_p + c * col_r
                row_p = a[p, :].copy()
                row_r = a[r, :]
                a[p, :] = c * row_p - s * row_r
                a[r, :] = s * row_p + c * row_r
                a[p, r] = a[r, p] = 0.0
                vec_p = q[:, p].copy()
                q[:, p] = c * vec_p - s * q[:, r]
                q[:, r] = s * vec_p + c * q[:, r]
    if np.max(np.abs(a[upper])) < threshold:
        return _sorted(np.diag(a).copy(), q)
    raise NumericError(f"Jacobi iteration did not converge within {max_sweeps} sweeps")


def _sorted(w: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(w, kind="stable")
    return w[order], q[:, order]


def symmetric_sqrt(matrix: np.ndarray) -> np.ndarray:
    """Principal square root of a symmetric positive semidefinite matrix."""
    w, q = symmetric_eigensystem(matrix)
    root = (q * np.sqrt(np.clip(w, 0.0, None))) @ q.T
    return 0.5 * (root + root.T)
