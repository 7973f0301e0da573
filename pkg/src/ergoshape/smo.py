"""Sequential minimal optimization for the soft-margin kernel dual.

Solves

    min_a  0.5 a' Q a - sum(a)   s.t.  0 <= a <= C,  z' a = 0

with ``Q_ij = z_i z_j K_ij`` by repeatedly optimizing the maximal violating
pair, the classic two-variable working-set rule: pick ``i`` maximizing
``-z_i g_i`` over the set still allowed to grow and ``j`` minimizing it over
the set still allowed to shrink, then solve that pair's subproblem in closed
form.  Terminates when the violation gap drops below ``tol``.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from .errors import EstimatorError, ValidationError


def repair_start(alpha0: NDArray, z: NDArray, C: float) -> NDArray[np.float64]:
    """Project a warm-start point into the feasible set.

    Clips to the box, then rescales whichever side of ``z' a = 0`` has the
    surplus; scaling down preserves the box constraints.
    """
    a = np.clip(np.asarray(alpha0, dtype=float), 0.0, C)
    pos = z > 0
    s_pos = a[pos].sum()
    s_neg = a[~pos].sum()
    if s_pos > s_neg and s_pos > 0:
        a[pos] *= s_neg / s_pos
    elif s_neg > s_pos and s_neg > 0:
        a[~pos] *= s_pos / s_neg
    return a


def solve_dual(
    K: NDArray,
    z: NDArray,
    C: float,
    tol: float = 1e-3,
    max_iter: int = 100_000,
    alpha0: NDArray | None = None,
) -> tuple[NDArray[np.float64], float, int]:
    """Return ``(alpha, b, iterations)`` for the soft-margin dual.

    ``K`` is the full kernel matrix, ``z`` the +/-1 labels.  ``alpha0``
    optionally warm-starts the solve (it is repaired onto the constraint
    set first).  Raises :class:`EstimatorError` if the violation gap fails
    to reach ``tol`` within ``max_iter`` pair updates.
    """
    K = np.asarray(K, dtype=float)
    z = np.asarray(z, dtype=float)
    n = z.shape[0]
    if K.shape != (n, n):
        raise ValidationError(f"kernel matrix must be ({n}, {n}), got {K.shape}")
    if not np.all(np.abs(z) == 1.0):
        raise ValidationError("labels for the dual must be +/-1")
    if C <= 0:
        raise ValidationError(f"C must be positive, got {C}")
    if n < 2 or np.all(z == z[0]):
        raise ValidationError("dual needs at least one sample of each class")
    if max_iter < 1:
        raise ValidationError(f"max_iter must be >= 1, got {max_iter}")

    if alpha0 is None:
        alpha = np.zeros(n)
        grad = -np.ones(n)
    else:
        if np.asarray(alpha0).shape != (n,):
            raise ValidationError(f"alpha0 must have shape ({n},)")
        alpha = repair_start(alpha0, z, C)
        grad = z * (K @ (z * alpha)) - 1.0

    diag = np.diag(K)
    m = M = 0.0
    for it in range(max_iter):
        zg = -z * grad
        up = ((z > 0) & (alpha < C)) | ((z < 0) & (alpha > 0))
        low = ((z > 0) & (alpha > 0)) | ((z < 0) & (alpha < C))
        if not up.any() or not low.any():
            break
        zg_up = np.where(up, zg, -np.inf)
        zg_low = np.where(low, zg, np.inf)
        i = int(np.argmax(zg_up))
        j = int(np.argmin(zg_low))
        m, M = zg_up[i], zg_low[j]
        if m - M <= tol:
            break
        quad = max(diag[i] + diag[j] - 2.0 * K[i, j], 1e-12)
        t = (m - M) / quad
        # box limits along the feasible direction (a_i += z_i t, a_j -= z_j t)
        t = min(t, C - alpha[i] if z[i] > 0 else alpha[i])
        t = min(t, alpha[j] if z[j] > 0 else C - alpha[j])
        alpha[i] += z[i] * t
        alpha[j] -= z[j] * t
        grad += t * z * (K[:, i] - K[:, j])
    else:
        raise EstimatorError(
            f"pair optimization did not converge in {max_iter} iterations "
            f"(violation gap {m - M:.3g} > {tol})"
        )

    # intercept from the free support vectors, else the violation midpoint
    free = (alpha > 1e-8) & (alpha < C - 1e-8)
    if free.any():
        b = float(np.mean((-z * grad)[free]))
    else:
        zg = -z * grad
        up = ((z > 0) & (alpha < C)) | ((z < 0) & (alpha > 0))
        low = ((z > 0) & (alpha > 0)) | ((z < 0) & (alpha < C))
        hi = np.max(np.where(up, zg, -np.inf)) if up.any() else 0.0
        lo = np.min(np.where(low, zg, np.inf)) if low.any() else 0.0
        b = float(0.5 * (hi + lo))
    return alpha, b, it + 1
