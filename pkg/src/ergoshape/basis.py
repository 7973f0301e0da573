"""Cosine Fourier basis machinery for the ergodic metric on the unit box.

The spatial domain is ``[0, 1]^n``.  Basis functions are

    F_k(x) = (1 / h_k) * prod_i cos(k_i * pi * x_i)

with multi-index ``k`` in ``{0, ..., k_max}^n`` and ``h_k`` the L2
normalizer making each ``F_k`` unit-norm over the box.  Each mode carries a
Sobolev weight ``Lambda_k = (1 + ||k||^2)^(-(n+1)/2)`` that discounts high
frequencies when comparing a trajectory's time-average statistics against a
target spatial distribution.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from .errors import ValidationError
from .grid import BoxGrid, check_in_box


def lambda_weight(k: NDArray) -> float:
    """Sobolev-type weight ``(1 + ||k||^2)^(-(n+1)/2)`` for one multi-index."""
    k = np.asarray(k, dtype=float)
    n = k.shape[-1]
    return float((1.0 + np.sum(k * k)) ** (-(n + 1) / 2.0))


def _normalizer(modes: NDArray) -> NDArray[np.float64]:
    # integral of cos^2(k pi x) over [0,1] is 1 for k = 0 and 1/2 otherwise,
    # so h_k^2 is (1/2)^(#nonzero indices)
    nonzero = np.count_nonzero(modes, axis=-1)
    return np.sqrt(0.5**nonzero)


def fourier_basis(k: NDArray, x: NDArray) -> float:
    """Evaluate one normalized cosine mode at a single point."""
    k = np.asarray(k, dtype=float)
    x = check_in_box(x)
    if k.shape != x.shape:
        raise ValidationError(f"mode shape {k.shape} != point shape {x.shape}")
    h = _normalizer(k)
    return float(np.prod(np.cos(np.pi * k * x)) / h)


def fourier_basis_grad(k: NDArray, x: NDArray) -> NDArray[np.float64]:
    """Gradient of one normalized cosine mode at a single point."""
    k = np.asarray(k, dtype=float)
    x = check_in_box(x)
    if k.shape != x.shape:
        raise ValidationError(f"mode shape {k.shape} != point shape {x.shape}")
    h = _normalizer(k)
    cos_terms = np.cos(np.pi * k * x)
    sin_terms = -np.pi * k * np.sin(np.pi * k * x)
    grad = np.empty_like(x)
    for axis in range(x.shape[0]):
        parts = cos_terms.copy()
        parts[axis] = sin_terms[axis]
        grad[axis] = np.prod(parts)
    return grad / h


class ModeBasis:
    """The full set of modes ``{0..k_max}^dim`` with weights and normalizers.

    Modes are ordered row-major over the index box (first axis slowest), so
    mode ``m`` in 2-D is ``(m // (k_max+1), m % (k_max+1))``.

    Attributes
    ----------
    modes : (M, dim) int array
    h : (M,) L2 normalizers
    lam : (M,) Sobolev weights
    """

    def __init__(self, dim: int, k_max: int):
        if dim not in (2, 3):
            raise ValidationError(f"basis dimension must be 2 or 3, got {dim}")
        if not isinstance(k_max, (int, np.integer)) or k_max < 1:
            raise ValidationError(f"k_max must be an integer >= 1, got {k_max!r}")
        self.dim = int(dim)
        self.k_max = int(k_max)
        rng = np.arange(self.k_max + 1)
        mesh = np.meshgrid(*([rng] * self.dim), indexing="ij")
        self.modes: NDArray[np.int64] = np.stack(
            [m.reshape(-1) for m in mesh], axis=-1
        )
        self.size = self.modes.shape[0]
        self.h: NDArray[np.float64] = _normalizer(self.modes)
        sq = 1.0 + np.sum(self.modes.astype(float) ** 2, axis=-1)
        self.lam: NDArray[np.float64] = sq ** (-(self.dim + 1) / 2.0)
        # mode index values k*pi per axis, reused by the separable products
        self._kpi = np.pi * rng.astype(float)

    # -- separable evaluation helpers -------------------------------------

    def _axis_tables(self, x: NDArray) -> list[NDArray[np.float64]]:
        return [np.cos(self._kpi * x[a]) for a in range(self.dim)]

    def value(self, x: NDArray) -> NDArray[np.float64]:
        """All mode values ``F_k(x)`` at a single point, shape (M,)."""
        x = check_in_box(x)
        if x.shape != (self.dim,):
            raise ValidationError(f"expected point of shape ({self.dim},)")
        tables = self._axis_tables(x)
        if self.dim == 2:
            prod = np.multiply.outer(tables[0], tables[1])
        else:
            prod = np.einsum("i,j,k->ijk", *tables)
        return prod.reshape(-1) / self.h

    def gradient(self, x: NDArray) -> NDArray[np.float64]:
        """All mode gradients at a single point, shape (M, dim)."""
        x = check_in_box(x)
        if x.shape != (self.dim,):
            raise ValidationError(f"expected point of shape ({self.dim},)")
        cos_t = self._axis_tables(x)
        sin_t = [-self._kpi * np.sin(self._kpi * x[a]) for a in range(self.dim)]
        grad = np.empty((self.size, self.dim))
        for axis in range(self.dim):
            tables = [sin_t[a] if a == axis else cos_t[a] for a in range(self.dim)]
            if self.dim == 2:
                prod = np.multiply.outer(tables[0], tables[1])
            else:
                prod = np.einsum("i,j,k->ijk", *tables)
            grad[:, axis] = prod.reshape(-1)
        return grad / self.h[:, None]

    def value_batch(self, X: NDArray) -> NDArray[np.float64]:
        """Mode values for a batch of points, shape (N, M)."""
        X = check_in_box(X)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise ValidationError(f"expected points of shape (N, {self.dim})")
        # (N, dim, k_max+1) cosine tables, then a separable product
        tables = np.cos(self._kpi[None, None, :] * X[:, :, None])
        if self.dim == 2:
            prod = np.einsum("ni,nj->nij", tables[:, 0], tables[:, 1])
        else:
            prod = np.einsum("ni,nj,nk->nijk", tables[:, 0], tables[:, 1], tables[:, 2])
        return prod.reshape(X.shape[0], -1) / self.h[None, :]

    def gradient_batch(self, X: NDArray) -> NDArray[np.float64]:
        """Mode gradients for a batch of points, shape (N, M, dim)."""
        X = check_in_box(X)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise ValidationError(f"expected points of shape (N, {self.dim})")
        arg = self._kpi[None, None, :] * X[:, :, None]
        cos_t = np.cos(arg)
        sin_t = -self._kpi[None, None, :] * np.sin(arg)
        n = X.shape[0]
        grad = np.empty((n, self.size, self.dim))
        for axis in range(self.dim):
            tabs = [
                sin_t[:, a] if a == axis else cos_t[:, a] for a in range(self.dim)
            ]
            if self.dim == 2:
                prod = np.einsum("ni,nj->nij", tabs[0], tabs[1])
            else:
                prod = np.einsum("ni,nj,nk->nijk", tabs[0], tabs[1], tabs[2])
            grad[:, :, axis] = prod.reshape(n, -1)
        return grad / self.h[None, :, None]

    # -- distribution projection ------------------------------------------

    def distribution_coeffs(
        self, density: NDArray, grid: BoxGrid
    ) -> NDArray[np.float64]:
        """Project a normalized cell density onto the basis (midpoint rule).

        ``density`` holds per-cell values of a probability density on the
        grid; it must be non-negative and integrate to one
        (``sum * cell_volume == 1`` within 1e-6).
        """
        density = np.asarray(density, dtype=float)
        if grid.dim != self.dim:
            raise ValidationError(
                f"grid dimension {grid.dim} != basis dimension {self.dim}"
            )
        if density.shape != grid.shape:
            density = grid.reshape(density)
        if density.min() < -1e-12:
            raise ValidationError("density has negative cells")
        total = density.sum() * grid.cell_volume
        if abs(total - 1.0) > 1e-6:
            raise ValidationError(
                f"density integrates to {total:.6g}, expected 1 within 1e-6"
            )
        # cosine table per axis: (k_max+1, resolution)
        table = np.cos(np.multiply.outer(self._kpi, grid.axis_centers))
        if self.dim == 2:
            coeffs = np.einsum("ai,bj,ij->ab", table, table, density)
        else:
            coeffs = np.einsum("ai,bj,ck,ijk->abc", table, table, table, density)
        return coeffs.reshape(-1) * grid.cell_volume / self.h


class TrajectoryAverager:
    """Streaming trapezoid-rule time average of the basis along a trajectory.

    Tracks ``c_k(t) = (1 / (t - t0)) * integral_{t0}^{t} F_k(x(s)) ds`` as
    samples arrive.  Before any update the coefficients are the basis values
    at the initial point (the limiting average for zero elapsed time).
    """

    def __init__(self, basis: ModeBasis, x0: NDArray):
        self.basis = basis
        self._last = basis.value(x0)
        self._integral = np.zeros(basis.size)
        self.elapsed = 0.0

    def update(self, x: NDArray, dt: float) -> None:
        """Advance the running integral by one sample a time ``dt`` later."""
        if dt <= 0.0:
            raise ValidationError(f"dt must be positive, got {dt}")
        f = self.basis.value(x)
        self._integral += 0.5 * dt * (self._last + f)
        self._last = f
        self.elapsed += dt

    @property
    def coeffs(self) -> NDArray[np.float64]:
        if self.elapsed == 0.0:
            return self._last.copy()
        return self._integral / self.elapsed

    def clone(self) -> "TrajectoryAverager":
        """Independent copy, used to extend the average along a lookahead."""
        out = TrajectoryAverager.__new__(TrajectoryAverager)
        out.basis = self.basis
        out._last = self._last.copy()
        out._integral = self._integral.copy()
        out.elapsed = self.elapsed
        return out

    def extended_coeffs(
        self, positions: NDArray, dt: float
    ) -> tuple[NDArray[np.float64], float]:
        """Coefficients after hypothetically appending ``positions`` at
        spacing ``dt`` (without mutating the averager).

        Returns the extended coefficients and the total time they average
        over.  Equivalent to cloning and updating point by point.
        """
        positions = np.asarray(positions, dtype=float)
        if positions.ndim != 2 or positions.shape[0] == 0:
            raise ValidationError("positions must be a non-empty (N, dim) array")
        if dt <= 0.0:
            raise ValidationError(f"dt must be positive, got {dt}")
        F = self.basis.value_batch(positions)
        samples = np.vstack([self._last[None, :], F])
        integral = self._integral + 0.5 * dt * (samples[:-1] + samples[1:]).sum(axis=0)
        span = self.elapsed + dt * positions.shape[0]
        return integral / span, span


def ergodic_metric(
    traj_coeffs: NDArray, dist_coeffs: NDArray, basis: ModeBasis
) -> float:
    """Weighted squared distance between trajectory and target coefficients."""
    c = np.asarray(traj_coeffs, dtype=float)
    p = np.asarray(dist_coeffs, dtype=float)
    if c.shape != (basis.size,) or p.shape != (basis.size,):
        raise ValidationError(
            f"coefficient arrays must have shape ({basis.size},), "
            f"got {c.shape} and {p.shape}"
        )
    d = c - p
    return float(np.sum(basis.lam * d * d))
