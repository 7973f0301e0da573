"""Boundary estimators, probability calibration, and target construction.

The shape estimate is the zero level set of a kernel decision function
fitted to binary contact data.  Labels map to the internal convention
``collision -> -1, free -> +1`` so the decision value is negative inside
the estimated shape, matching the sign convention of the shape fields.

Two estimators share that interface: a soft-margin kernel classifier
(fitted by pair optimization, see :mod:`ergoshape.smo`) whose decision
values get a sigmoid calibration into collision probabilities, and a
Gaussian-process regressor on the +/-1 labels whose predictive variance
drives exploration instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import cho_factor, cho_solve, solve_triangular
from scipy.spatial.distance import cdist
from scipy.special import expit
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .basis import ModeBasis
from .errors import CalibrationError, EstimatorError, NotFittableError, ValidationError
from .grid import BoxGrid


def rbf_kernel(A: NDArray, B: NDArray, sigma: float) -> NDArray[np.float64]:
    """``exp(-||a - b||^2 / sigma^2)`` for all pairs of rows."""
    if sigma <= 0:
        raise ValidationError(f"kernel width must be positive, got {sigma}")
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    return np.exp(-cdist(A, B, "sqeuclidean") / (sigma * sigma))


def _check_labels(y: NDArray) -> NDArray[np.int_]:
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValidationError("labels must be a 1-D array")
    if not np.all(np.isin(y, (0, 1))):
        raise ValidationError("labels must be 0 (free) or 1 (contact)")
    return y.astype(int)


class RbfBoundaryClassifier(BaseEstimator):
    """Soft-margin RBF classifier for binary contact data.

    ``decision_function`` is negative on the collision side; ``predict``
    returns 1 (contact) where the decision value is <= 0.  Training data
    is canonically re-ordered before the solve, so the fit is independent
    of input permutation.

    Parameters
    ----------
    sigma : float
        RBF kernel width.
    C : float
        Soft-margin penalty.
    tol : float
        Violation-gap tolerance for the dual solve.
    max_iter : int
        Pair-update budget for the dual solve.
    """

    floor_mode = "clamp"

    def __init__(
        self,
        sigma: float = 0.08,
        C: float = 10.0,
        tol: float = 1e-3,
        max_iter: int = 200_000,
    ):
        self.sigma = sigma
        self.C = C
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y, alpha0: NDArray | None = None):
        """Fit from positions ``X`` and binary labels ``y``.

        ``alpha0`` optionally carries dual variables from a previous fit,
        aligned with the rows of ``X`` (zero for new points).
        """
        from .smo import solve_dual

        X = check_array(X, dtype=float)
        y = _check_labels(y)
        if X.shape[0] != y.shape[0]:
            raise ValidationError("X and y have mismatched lengths")
        n0, n1 = int(np.sum(y == 0)), int(np.sum(y == 1))
        if n0 == 0 or n1 == 0:
            raise NotFittableError(
                f"need both labels to fit a boundary (free={n0}, contact={n1})"
            )

        # canonical order: coordinates then label, so duplicate feeds in any
        # permutation produce the same dual solve
        order = np.lexsort(tuple(X[:, a] for a in reversed(range(X.shape[1]))) + (y,))
        Xs, ys = X[order], y[order]
        z = np.where(ys == 1, -1.0, 1.0)
        K = rbf_kernel(Xs, Xs, self.sigma)
        a0 = None if alpha0 is None else np.asarray(alpha0, dtype=float)[order]
        alpha, b, iters = solve_dual(
            K, z, self.C, tol=self.tol, max_iter=self.max_iter, alpha0=a0
        )

        sv = alpha > 1e-10
        self.support_points_ = Xs[sv]
        self.dual_coef_ = alpha[sv] * z[sv]
        self.support_labels_ = ys[sv]
        self.intercept_ = b
        self.n_iter_ = iters
        self.calibration_ = None
        # dual variables back in input order, for warm-starting the next fit
        self.alpha_input_order_ = np.empty_like(alpha)
        self.alpha_input_order_[order] = alpha
        return self

    def decision_function(self, X) -> NDArray[np.float64]:
        check_is_fitted(self, "dual_coef_")
        X = check_array(X, dtype=float)
        if self.support_points_.shape[0] == 0:
            return np.full(X.shape[0], self.intercept_)
        K = rbf_kernel(X, self.support_points_, self.sigma)
        return K @ self.dual_coef_ + self.intercept_

    def predict(self, X) -> NDArray[np.int_]:
        return (self.decision_function(X) <= 0.0).astype(int)

    def boundary_values(self, X) -> NDArray[np.float64]:
        """Signed estimate of the shape field (negative inside)."""
        return self.decision_function(X)

    def calibrate(self, X, y):
        """Fit the sigmoid map from decision values to collision probability."""
        f = self.decision_function(X)
        self.calibration_ = PlattCalibration().fit(f, _check_labels(y))
        return self

    def predict_proba(self, X) -> NDArray[np.float64]:
        check_is_fitted(self, "dual_coef_")
        if self.calibration_ is None:
            raise EstimatorError("classifier has no calibration; call calibrate()")
        p1 = self.calibration_.probability(self.decision_function(X))
        return np.stack([1.0 - p1, p1], axis=-1)

    def target_weight(self, X) -> NDArray[np.float64]:
        """Collision probability, the exploration weight for this estimator."""
        return self.predict_proba(X)[:, 1]


class PlattCalibration:
    """Sigmoid calibration of decision values: ``P(contact) = expit(-(A f + B))``.

    Fits ``A`` and ``B`` by Newton iterations on the regularized Bernoulli
    likelihood (smoothed targets), with step halving for robustness.
    """

    def __init__(self, max_iter: int = 100, grad_tol: float = 1e-8):
        self.max_iter = max_iter
        self.grad_tol = grad_tol

    def fit(self, f: NDArray, y: NDArray):
        f = np.asarray(f, dtype=float)
        y = _check_labels(y)
        if f.shape != y.shape:
            raise ValidationError("decision values and labels have mismatched shapes")
        n1 = int(np.sum(y == 1))
        n0 = y.shape[0] - n1
        if n0 == 0 or n1 == 0:
            raise CalibrationError("calibration needs both labels")
        t = np.where(y == 1, (n1 + 1.0) / (n1 + 2.0), 1.0 / (n0 + 2.0))

        def nll(a, b):
            s = a * f + b
            return float(np.sum(np.logaddexp(0.0, s) - (1.0 - t) * s))

        A = 0.0
        B = float(np.log((n0 + 1.0) / (n1 + 1.0)))
        value = nll(A, B)
        for _ in range(self.max_iter):
            s = A * f + B
            p = expit(-s)
            d = t - p  # gradient of the likelihood w.r.t. s
            g = np.array([np.sum(d * f), np.sum(d)])
            if np.max(np.abs(g)) < self.grad_tol:
                self.A_ = float(A)
                self.B_ = float(B)
                return self
            w = p * (1.0 - p)
            H = np.array(
                [
                    [np.sum(w * f * f) + 1e-12, np.sum(w * f)],
                    [np.sum(w * f), np.sum(w) + 1e-12],
                ]
            )
            step = np.linalg.solve(H, -g)
            scale = 1.0
            while scale >= 1e-10:
                cand = nll(A + scale * step[0], B + scale * step[1])
                if cand < value + 1e-12:
                    A += scale * step[0]
                    B += scale * step[1]
                    value = cand
                    break
                scale *= 0.5
            else:
                raise CalibrationError("sigmoid fit stalled (no descent step found)")
        raise CalibrationError(
            f"sigmoid fit did not converge in {self.max_iter} iterations"
        )

    def probability(self, f: NDArray) -> NDArray[np.float64]:
        if not hasattr(self, "A_"):
            raise CalibrationError("calibration has not been fitted")
        return expit(-(self.A_ * np.asarray(f, dtype=float) + self.B_))


class GaussianProcessBoundary(BaseEstimator):
    """GP regression on +/-1 contact labels with a unit-variance RBF prior.

    The predictive mean plays the role of the signed boundary estimate
    (negative inside), and the predictive variance is the exploration
    weight.
    """

    floor_mode = "shift"

    def __init__(self, sigma: float = 0.08, noise: float = 1e-2):
        self.sigma = sigma
        self.noise = noise

    def fit(self, X, y):
        y = _check_labels(y)
        if y.shape[0] == 0:
            raise NotFittableError("cannot fit a boundary to zero measurements")
        X = check_array(X, dtype=float)
        if X.shape[0] != y.shape[0]:
            raise ValidationError("X and y have mismatched lengths")
        if self.noise <= 0:
            raise ValidationError(f"noise must be positive, got {self.noise}")
        z = np.where(y == 1, -1.0, 1.0)
        K = rbf_kernel(X, X, self.sigma)
        n = X.shape[0]
        factor = None
        for jitter in (0.0, 1e-10, 1e-8, 1e-6, 1e-4):
            try:
                factor = cho_factor(
                    K + (self.noise + jitter) * np.eye(n), lower=True
                )
                break
            except np.linalg.LinAlgError:
                continue
        if factor is None:
            raise EstimatorError("kernel matrix could not be factorized")
        self.X_train_ = X
        self.chol_ = factor
        self.alpha_ = cho_solve(factor, z)
        return self

    def predict(self, X) -> NDArray[np.float64]:
        check_is_fitted(self, "alpha_")
        X = check_array(X, dtype=float)
        return rbf_kernel(X, self.X_train_, self.sigma) @ self.alpha_

    def variance(self, X) -> NDArray[np.float64]:
        check_is_fitted(self, "alpha_")
        X = check_array(X, dtype=float)
        k_star = rbf_kernel(self.X_train_, X, self.sigma)
        v = solve_triangular(self.chol_[0], k_star, lower=True)
        return np.clip(1.0 - np.sum(v * v, axis=0), 0.0, None)

    def boundary_values(self, X) -> NDArray[np.float64]:
        return self.predict(X)

    def target_weight(self, X) -> NDArray[np.float64]:
        return self.variance(X)


@dataclass
class TargetDistribution:
    """A normalized exploration density on the grid plus its projection."""

    density: NDArray[np.float64]
    coeffs: NDArray[np.float64]


def uniform_target(grid: BoxGrid, basis: ModeBasis) -> TargetDistribution:
    density = np.ones(grid.shape)
    return TargetDistribution(density, basis.distribution_coeffs(density, grid))


def build_target(
    estimator,
    grid: BoxGrid,
    basis: ModeBasis,
    epsilon: float = 1e-3,
) -> TargetDistribution:
    """Exploration target from an estimator's weight field.

    The weight is kept strictly positive before normalizing so unexplored
    space never loses coverage pressure entirely.  Probability weights
    (``floor_mode == "clamp"``) are clamped at ``epsilon * max(weight)``;
    variance weights (``floor_mode == "shift"``), whose natural scale is
    the unit prior, are shifted by ``epsilon`` instead.  With no estimator
    yet, the target is uniform.
    """
    if not 0 < epsilon < 1:
        raise ValidationError(f"epsilon must be in (0, 1), got {epsilon}")
    if estimator is None:
        return uniform_target(grid, basis)
    w = np.asarray(estimator.target_weight(grid.centers), dtype=float)
    if w.shape != (grid.size,):
        raise ValidationError("estimator weight has the wrong length for the grid")
    if not np.all(np.isfinite(w)):
        raise EstimatorError("estimator produced non-finite exploration weights")
    top = w.max()
    if top <= 0.0:
        return uniform_target(grid, basis)
    if getattr(estimator, "floor_mode", "clamp") == "shift":
        w = w + epsilon
    else:
        w = np.maximum(w, epsilon * top)
    density = grid.reshape(w / (w.sum() * grid.cell_volume))
    return TargetDistribution(density, basis.distribution_coeffs(density, grid))
