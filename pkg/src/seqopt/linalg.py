"""Cyclic Jacobi diagonalization for the 3x3 and 4x4 quadratic forms."""
from __future__ import annotations

import numpy as np

from .errors import ConfigurationError

_SYM_TOL = 1e-12


def jacobi_eigh(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 64):
    """Eigen-decomposition of a small real symmetric matrix.

    Returns ``(values, vectors)`` with eigenvectors in the columns, in the
    order the rotations leave them (no sorting). Sweeps run until the
    off-diagonal Frobenius norm drops below ``tol`` times the matrix scale.
    """
    a = np.array(a, dtype=float)
    k = a.shape[0]
    if a.shape != (k, k):
        raise ConfigurationError("matrix must be square")
    if np.max(np.abs(a - a.T), initial=0.0) > _SYM_TOL * max(1.0, np.max(np.abs(a))):
        raise ConfigurationError("matrix is not symmetric")
    a = (a + a.T) / 2
    v = np.eye(k)
    scale = max(np.linalg.norm(a), 1e-300)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * scale:
            break
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                # rotation angle that annihilates a[p, q]
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # A <- R^T A R with R = identity except the (p, q) plane
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p], a[:, q] = c * cp - s * cq, s * cp + c * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :], a[q, :] = c * rp - s * rq, s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p], v[:, q] = c * vp - s * vq, s * vp + c * vq
    return np.diag(a).copy(), v


def lowest_eigenpair_sym(matrix: np.ndarray) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue and its unit eigenvector.

    Ties go to the lowest column index left by the sweep; the sign is fixed so
    the first component with magnitude above 1e-12 is positive.
    """
    values, vectors = jacobi_eigh(matrix)
    i = int(np.argmin(values))
    vec = vectors[:, i]
    vec = vec / np.linalg.norm(vec)
    nz = np.flatnonzero(np.abs(vec) > 1e-12)
    if nz.size and vec[nz[0]] < 0:
        vec = -vec
    return float(values[i]), vec
