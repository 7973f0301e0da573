"""Receding-horizon ergodic controller.

Each control cycle runs four stages:

1. roll the dynamics forward over a short horizon under the default
   control (walls included, obstacles ignored — contacts are surprises by
   construction, the predictor knows only the box);
2. extend the trajectory's running basis average over that rollout;
3. sweep the sensitivity (adjoint) variable backward from zero: the
   coverage mismatch at the end of the horizon forces the position rows,
   and the velocity rows accumulate them through the double-integrator
   coupling;
4. at the first few nodes, compute the action that best trades pushing
   the predicted cost down at rate ``alpha_d`` against the control
   penalty: ``u* = (v v' + R)^-1 (v v' u0 + v alpha_d)`` with
   ``v = h(x)' rho``, then clip to the actuation box.

The weighted coverage mismatch enters as a constant multiplier over the
sweep because the averaged statistics respond to a control perturbation
anywhere in the horizon through the same end-of-horizon average; dividing
by the total averaging span (history plus horizon) makes the sensitivity
exact for the running average the simulator maintains.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .basis import ModeBasis, TrajectoryAverager
from .dynamics import DoubleIntegrator, SensorState, clamp_to_box, saturate
from .errors import ValidationError


@dataclass
class EsacParams:
    """Tuning knobs for the ergodic controller."""

    q: float = 30.0
    r_diag: tuple[float, ...] = (0.01, 0.01)
    horizon: float = 0.8
    alpha_d: float = -555.0
    t_s: float = 0.05
    dt: float = 0.01
    u_max: float = 10.0
    u_default: tuple[float, ...] = (0.0, 0.0)
    grad_margin: float = 0.008

    def __post_init__(self):
        if self.q <= 0:
            raise ValidationError(f"q must be positive, got {self.q}")
        if any(r <= 0 for r in self.r_diag):
            raise ValidationError(f"r_diag entries must be positive, got {self.r_diag}")
        if self.dt <= 0 or self.t_s <= 0 or self.horizon <= 0:
            raise ValidationError("dt, t_s, and horizon must be positive")
        if self.t_s > self.horizon:
            raise ValidationError(
                f"action window {self.t_s} exceeds horizon {self.horizon}"
            )
        if self.alpha_d >= 0:
            raise ValidationError(f"alpha_d must be negative, got {self.alpha_d}")
        if self.u_max <= 0:
            raise ValidationError(f"u_max must be positive, got {self.u_max}")
        if len(self.u_default) != len(self.r_diag):
            raise ValidationError("u_default and r_diag must have equal length")
        for name, span in (("horizon", self.horizon), ("t_s", self.t_s)):
            steps = span / self.dt
            if abs(steps - round(steps)) > 1e-9:
                raise ValidationError(f"{name} must be a multiple of dt")
        if not 0 <= self.grad_margin < 0.5:
            raise ValidationError(
                f"grad_margin must be in [0, 0.5), got {self.grad_margin}"
            )

    @property
    def dim(self) -> int:
        return len(self.r_diag)

    @property
    def horizon_steps(self) -> int:
        return int(round(self.horizon / self.dt))

    @property
    def window_steps(self) -> int:
        return int(round(self.t_s / self.dt))

    def r_matrix(self) -> NDArray[np.float64]:
        return np.diag(np.asarray(self.r_diag, dtype=float))


@dataclass
class HorizonRollout:
    """Predicted open-loop motion over one horizon."""

    times: NDArray[np.float64]
    pos: NDArray[np.float64]
    vel: NDArray[np.float64]


@dataclass
class ActionSchedule:
    """Controls to apply over the next action window, one per ``dt``."""

    times: NDArray[np.float64]
    controls: NDArray[np.float64]

    def at_step(self, k: int) -> NDArray[np.float64]:
        return self.controls[min(k, self.controls.shape[0] - 1)]


def predict(
    state: SensorState,
    params: EsacParams,
    dyn: DoubleIntegrator,
    t0: float = 0.0,
) -> HorizonRollout:
    """Roll the dynamics under the default control, clamping at the walls."""
    H = params.horizon_steps
    u0 = np.asarray(params.u_default, dtype=float)
    pos = np.empty((H + 1, dyn.dim))
    vel = np.empty((H + 1, dyn.dim))
    pos[0], vel[0] = state.pos, state.vel
    cur = state.copy()
    for i in range(H):
        nxt = dyn.rk4_step(cur, u0, params.dt)
        p, v = clamp_to_box(nxt.pos, nxt.vel)
        cur = SensorState(p, v)
        pos[i + 1], vel[i + 1] = p, v
    times = t0 + params.dt * np.arange(H + 1)
    return HorizonRollout(times, pos, vel)


def horizon_average(
    averager: TrajectoryAverager, rollout: HorizonRollout, dt: float
) -> tuple[NDArray[np.float64], float]:
    """Extend the running basis average over a rollout (copy, not in place).

    Returns the end-of-horizon coefficients and the total averaging span
    they cover (history plus horizon).
    """
    return averager.extended_coeffs(rollout.pos[1:], dt)


def mismatch_weights(
    c_end: NDArray,
    dist_coeffs: NDArray,
    basis: ModeBasis,
    q: float,
    span: float,
) -> NDArray[np.float64]:
    """Per-mode drive of the coverage cost: ``2 q lam_k (c_k - phi_k) / span``.

    ``span`` is the fixed time normalization of the drive — the receding
    horizon length in the closed loop.  Normalizing by a constant rather
    than the ever-growing averaging span keeps the correction pressure on
    under-visited regions from fading away in long runs.
    """
    if span <= 0:
        raise ValidationError(f"time normalization must be positive, got {span}")
    return 2.0 * q * basis.lam * (np.asarray(c_end) - np.asarray(dist_coeffs)) / span


def adjoint_sweep(
    rollout: HorizonRollout,
    weights: NDArray,
    basis: ModeBasis,
    params: EsacParams,
    dyn: DoubleIntegrator,
) -> NDArray[np.float64]:
    """Integrate the sensitivity variable backward from zero.

    Solves ``rho_dot = a(t) - A' rho`` with ``a``'s position rows equal to
    ``-sum_k w_k grad F_k(x(t))`` and zero velocity rows, from the end of
    the rollout to its start (RK4, forcing linearly interpolated at the
    half steps).  Returns ``rho`` at every rollout node, shape (H+1, 2n).

    Gradients are sampled ``grad_margin`` inside the walls: every mode's
    normal derivative vanishes identically on the box boundary, so a
    wall-riding rollout would otherwise see zero sensitivity to pushing
    back into the interior and the controller could never leave a wall.
    """
    H = rollout.pos.shape[0] - 1
    n = dyn.dim
    A_T = dyn.flow_jacobian().T
    a = np.zeros((H + 1, 2 * n))
    m = params.grad_margin
    eval_pos = np.clip(rollout.pos, m, 1.0 - m)
    grads = basis.gradient_batch(eval_pos)  # (H+1, M, n)
    a[:, :n] = -np.einsum("m,nmd->nd", np.asarray(weights, dtype=float), grads)
    rho = np.zeros((H + 1, 2 * n))
    dt = params.dt
    for i in range(H - 1, -1, -1):
        r = rho[i + 1]
        a_hi = a[i + 1]
        a_lo = a[i]
        a_mid = 0.5 * (a_hi + a_lo)
        k1 = a_hi - A_T @ r
        k2 = a_mid - A_T @ (r - 0.5 * dt * k1)
        k3 = a_mid - A_T @ (r - 0.5 * dt * k2)
        k4 = a_lo - A_T @ (r - dt * k3)
        rho[i] = r - (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


def pointwise_control(
    rho: NDArray, params: EsacParams, dyn: DoubleIntegrator
) -> NDArray[np.float64]:
    """Unclipped minimizer of the action trade-off at one node.

    Minimizes ``0.5 (v'(u - u0) - alpha_d)^2 + 0.5 u' R u`` where
    ``v = h(x)' rho`` is the velocity block of the sensitivity.
    """
    rho = np.asarray(rho, dtype=float)
    if rho.shape != (2 * dyn.dim,):
        raise ValidationError(f"rho must have shape ({2 * dyn.dim},)")
    u0 = np.asarray(params.u_default, dtype=float)
    v = dyn.control_matrix().T @ rho
    M = np.outer(v, v)
    return np.linalg.solve(M + params.r_matrix(), M @ u0 + v * params.alpha_d)


def insertion_sensitivity(
    rho: NDArray, v_action: NDArray, params: EsacParams, dyn: DoubleIntegrator
) -> float:
    """Predicted cost rate of swapping the default control for ``v_action``
    at a node with sensitivity ``rho``: ``rho' (f(x, v) - f(x, u0))``."""
    rho = np.asarray(rho, dtype=float)
    dv = np.asarray(v_action, dtype=float) - np.asarray(params.u_default, dtype=float)
    return float(rho[dyn.dim :] @ dv)


def esac_step(
    state: SensorState,
    averager: TrajectoryAverager,
    dist_coeffs: NDArray,
    basis: ModeBasis,
    params: EsacParams,
    dyn: DoubleIntegrator,
    t0: float = 0.0,
) -> ActionSchedule:
    """One full control cycle; returns the saturated action window."""
    rollout = predict(state, params, dyn, t0=t0)
    c_end, _ = horizon_average(averager, rollout, params.dt)
    w = mismatch_weights(c_end, dist_coeffs, basis, params.q, params.horizon)
    rho = adjoint_sweep(rollout, w, basis, params, dyn)
    n_s = params.window_steps
    controls = np.empty((n_s, dyn.dim))
    for k in range(n_s):
        u = pointwise_control(rho[k], params, dyn)
        controls[k] = saturate(u, params.u_max)
    return ActionSchedule(times=rollout.times[:n_s], controls=controls)
