"""Double-integrator sensor dynamics with walls and contact resolution.

The sensor is a kinematic point with state ``(pos, vel)`` in the unit box,
driven by an acceleration command.  Box walls are hard: positions clamp to
the box and the outgoing normal velocity is zeroed (no contact is recorded
for walls).  Obstacle surfaces are also hard; crossing one inside an
integration step is resolved by bisecting the step segment down to the
contact tolerance, placing the sensor on the surface, and removing the
inward normal velocity.  Each blocked penetration yields a contact record.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import SimulationError, ValidationError
from .shapes import Shape, World

CONTACT_TOL = 1e-6


@dataclass
class SensorState:
    """Position and velocity of the point sensor."""

    pos: NDArray[np.float64]
    vel: NDArray[np.float64]

    def __post_init__(self):
        self.pos = np.asarray(self.pos, dtype=float)
        self.vel = np.asarray(self.vel, dtype=float)
        if self.pos.shape != self.vel.shape or self.pos.ndim != 1:
            raise ValidationError(
                f"pos and vel must be 1-D arrays of equal length, got "
                f"{self.pos.shape} and {self.vel.shape}"
            )

    @property
    def dim(self) -> int:
        return self.pos.shape[0]

    def copy(self) -> "SensorState":
        return SensorState(self.pos.copy(), self.vel.copy())

    def as_vector(self) -> NDArray[np.float64]:
        return np.concatenate([self.pos, self.vel])


@dataclass
class Contact:
    """One blocked penetration: where, when, and which shape."""

    point: NDArray[np.float64]
    time: float
    shape_index: int


@dataclass
class StepResult:
    state: SensorState
    contact: Contact | None = None


class DoubleIntegrator:
    """``pos_dot = vel, vel_dot = u`` on the unit box."""

    def __init__(self, dim: int):
        if dim not in (2, 3):
            raise ValidationError(f"dynamics dimension must be 2 or 3, got {dim}")
        self.dim = int(dim)

    def flow(self, state: SensorState, u: NDArray) -> NDArray[np.float64]:
        """Time derivative of the stacked state vector (2*dim,)."""
        u = np.asarray(u, dtype=float)
        if u.shape != (self.dim,):
            raise ValidationError(f"control must have shape ({self.dim},)")
        return np.concatenate([state.vel, u])

    def flow_jacobian(self) -> NDArray[np.float64]:
        """State Jacobian of the free flow: [[0, I], [0, 0]]."""
        n = self.dim
        A = np.zeros((2 * n, 2 * n))
        A[:n, n:] = np.eye(n)
        return A

    def control_matrix(self) -> NDArray[np.float64]:
        """Input matrix h = [[0], [I]] mapping accelerations into the flow."""
        n = self.dim
        B = np.zeros((2 * n, n))
        B[n:, :] = np.eye(n)
        return B

    def rk4_step(self, state: SensorState, u: NDArray, dt: float) -> SensorState:
        """Classic fourth-order step (exact for constant acceleration)."""
        if dt <= 0:
            raise ValidationError(f"dt must be positive, got {dt}")
        y = state.as_vector()
        n = self.dim

        def f(yv):
            return np.concatenate([yv[n:], u])

        k1 = f(y)
        k2 = f(y + 0.5 * dt * k1)
        k3 = f(y + 0.5 * dt * k2)
        k4 = f(y + dt * k3)
        y_new = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        return SensorState(y_new[:n], y_new[n:])


def saturate(u: NDArray, u_max: float) -> NDArray[np.float64]:
    """Clip each control component to ``[-u_max, u_max]``."""
    if u_max <= 0:
        raise ValidationError(f"u_max must be positive, got {u_max}")
    return np.clip(np.asarray(u, dtype=float), -u_max, u_max)


def clamp_to_box(pos: NDArray, vel: NDArray) -> tuple[NDArray, NDArray]:
    """Clamp a position to the unit box and kill the outgoing velocity
    component on any wall that was hit."""
    pos = np.asarray(pos, dtype=float).copy()
    vel = np.asarray(vel, dtype=float).copy()
    low = pos < 0.0
    high = pos > 1.0
    pos[low] = 0.0
    pos[high] = 1.0
    vel[low & (vel < 0.0)] = 0.0
    vel[high & (vel > 0.0)] = 0.0
    return pos, vel


def _project_to_boundary(shape: Shape, x: NDArray, tol: float) -> NDArray:
    """Newton-project a point onto ``phi = 0`` along the local gradient."""
    x = np.asarray(x, dtype=float).copy()
    for _ in range(60):
        v = shape.value(x)
        if abs(v) <= 0.5 * tol:
            return x
        g = shape.gradient(x)
        gg = float(np.dot(g, g))
        if gg < 1e-18:
            break
        x = x - v * g / gg
    # fall back to a slightly-outside point along the last gradient
    v = shape.value(x)
    if v < -0.5 * tol:
        g = shape.gradient(x)
        n = np.linalg.norm(g)
        if n > 1e-12:
            x = x - (v - 0.25 * tol) * g / n
    return x


def resolve_collision(
    prev: SensorState,
    proposed: SensorState,
    world: World,
    t: float,
    tol: float = CONTACT_TOL,
) -> StepResult:
    """Enforce walls and obstacle surfaces on one integration step.

    ``prev`` must be in free space (any shape value >= -tol); otherwise the
    step invariant was already broken and a :class:`SimulationError` is
    raised.  Wall hits clamp silently; the earliest obstacle crossing along
    the step segment is located by bisection, the sensor is placed on the
    surface with its inward normal velocity removed, and a contact record
    is returned.
    """
    pos, vel = clamp_to_box(proposed.pos, proposed.vel)
    contact: Contact | None = None

    if world.shapes:
        phi_prev = np.array([s.value(prev.pos) for s in world.shapes])
        if np.any(phi_prev < -tol):
            idx = int(np.argmin(phi_prev))
            raise SimulationError(
                f"sensor started the step at depth {phi_prev[idx]:.3g} inside "
                f"shape {idx} ({world.shapes[idx].kind}) at t={t:.4f}"
            )

        seg = pos - prev.pos
        seg_len = float(np.linalg.norm(seg))
        # earliest crossing across shapes, by bisection parameter
        best = None  # (s_hit, anchor, shape_index)
        for i, shape in enumerate(world.shapes):
            phi_new = shape.value(pos)
            if phi_new > 0.0:
                continue
            if phi_prev[i] > tol and seg_len > 0.0:
                lo, hi = 0.0, 1.0  # phi(lo) > 0, phi(hi) <= 0
                while (hi - lo) * seg_len > 0.5 * tol:
                    mid = 0.5 * (lo + hi)
                    if shape.value(prev.pos + mid * seg) > 0.0:
                        lo = mid
                    else:
                        hi = mid
                s_hit = hi
                anchor = prev.pos + s_hit * seg
            else:
                # Started on the surface (or no travel): keep the tangential
                # motion by projecting the step endpoint, not the start,
                # so the sensor slides instead of freezing in place.
                s_hit = 0.0
                anchor = pos
            if best is None or s_hit < best[0]:
                best = (s_hit, anchor, i)

        if best is not None:
            s_hit, anchor, i = best
            shape = world.shapes[i]
            point = _project_to_boundary(shape, anchor, tol)
            g = shape.gradient(point)
            gn = np.linalg.norm(g)
            if gn > 1e-12:
                n_in = -g / gn
                vn = float(np.dot(vel, n_in))
                if vn > 0.0:
                    vel = vel - vn * n_in
            pos = point
            contact = Contact(point=point.copy(), time=t, shape_index=i)
            # clearance rules make double hits impossible in one step, but
            # guard against any residual penetration of other shapes
            for j, other in enumerate(world.shapes):
                if j != i and other.value(pos) < -tol:
                    pos = _project_to_boundary(other, pos, tol)

    return StepResult(SensorState(pos, vel), contact)
