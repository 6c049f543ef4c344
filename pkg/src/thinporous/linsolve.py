"""Conjugate gradients for the singular pure-Neumann systems.

All linear systems in this package are symmetric positive semidefinite with
the constants as null space (periodic cell problems, macroscale Darcy with
natural boundary conditions).  The solver below runs Jacobi-preconditioned
CG on the mean-zero subspace, projecting the constant mode out of every
iterate so roundoff cannot let the solution drift along the null space.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalError

__all__ = ["pcg_meanzero"]


def _project(v):
    v -= v.mean()
    return v


def pcg_meanzero(K, b, *, rtol=1e-12, max_iter=None):
    """Solve ``K x = b`` for mean-zero ``x`` with Jacobi-preconditioned CG.

    ``K`` must be symmetric positive semidefinite with null space spanned by
    the constant vector, and ``b`` (numerically) orthogonal to constants.
    Returns ``(x, relres, iterations)``; raises :class:`NumericalError` when
    the relative residual fails to reach ``rtol``.
    """
    n = K.shape[0]
    if max_iter is None:
        max_iter = max(2000, 40 * n)

    diag = np.asarray(K.diagonal(), dtype=float).copy()
    diag[diag <= 0.0] = 1.0

    b = _project(np.array(b, dtype=float))
    bnorm = np.linalg.norm(b)
    x = np.zeros(n)
    if bnorm == 0.0:
        return x, 0.0, 0

    r = b.copy()
    z = _project(r / diag)
    p = z.copy()
    rz = r @ z
    for it in range(1, max_iter + 1):
        Kp = K @ p
        denom = p @ Kp
        if denom <= 0.0:
            break  # null-space component from roundoff; restart is pointless
        alpha = rz / denom
        x += alpha * p
        r -= alpha * Kp
        res = np.linalg.norm(r)
        if res <= rtol * bnorm:
            return _project(x), res / bnorm, it
        z = _project(r / diag)
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise NumericalError(
        "conjugate gradients stalled",
        relative_residual=float(np.linalg.norm(r) / bnorm),
        iterations=it,
    )
