"""Greedy information-seeking baseline policy.

At each replan, sample candidate points in a ball around the sensor,
score them by the estimator's collision probability, and chase the best
one with a critically damped position controller.  Serves as the
comparison policy for the coverage-driven controller: it exploits the
current estimate aggressively but has no pressure to keep exploring, so
it tends to park on the first shape it finds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .dynamics import SensorState, saturate
from .errors import ValidationError


@dataclass
class GeerParams:
    """Tuning for the greedy baseline."""

    candidate_count: int = 50
    radius: float = 0.15
    waypoint_gain: float = 40.0
    replan_interval: float = 0.5
    arrive_tol: float = 0.02

    def __post_init__(self):
        if self.candidate_count < 1:
            raise ValidationError("candidate_count must be >= 1")
        if not 0 < self.radius <= 1:
            raise ValidationError(f"radius must be in (0, 1], got {self.radius}")
        if self.waypoint_gain <= 0:
            raise ValidationError("waypoint_gain must be positive")
        if self.replan_interval <= 0:
            raise ValidationError("replan_interval must be positive")
        if self.arrive_tol <= 0:
            raise ValidationError("arrive_tol must be positive")


class GeerPolicy:
    """Greedy posterior-chasing controller with PD waypoint tracking."""

    def __init__(self, params: GeerParams, dim: int, u_max: float, rng):
        self.params = params
        self.dim = int(dim)
        self.u_max = float(u_max)
        self.rng = rng
        self.waypoint: NDArray[np.float64] | None = None
        self._last_plan = -np.inf

    def _sample_candidates(self, center: NDArray) -> NDArray[np.float64]:
        n = self.params.candidate_count
        direction = self.rng.standard_normal((n, self.dim))
        norms = np.linalg.norm(direction, axis=-1, keepdims=True)
        norms[norms == 0] = 1.0
        direction /= norms
        # radius ~ R * U^(1/dim) gives uniform density inside the ball
        radii = self.params.radius * self.rng.uniform(0, 1, size=n) ** (1.0 / self.dim)
        return np.clip(center + direction * radii[:, None], 0.0, 1.0)

    def _replan(self, pos: NDArray, estimator) -> None:
        cands = self._sample_candidates(pos)
        if estimator is None:
            scores = np.zeros(cands.shape[0])
        else:
            scores = np.asarray(estimator.target_weight(cands), dtype=float)
        dists = np.linalg.norm(cands - pos, axis=-1)
        # best score, ties broken by distance then sample index
        order = np.lexsort((np.arange(cands.shape[0]), dists, -scores))
        self.waypoint = cands[order[0]].copy()

    def control(self, state: SensorState, estimator, t: float) -> NDArray[np.float64]:
        """Acceleration command for the current step."""
        due = (
            self.waypoint is None
            or np.linalg.norm(state.pos - self.waypoint) <= self.params.arrive_tol
            or t - self._last_plan >= self.params.replan_interval
        )
        if due:
            self._replan(state.pos, estimator)
            self._last_plan = t
        kp = self.params.waypoint_gain
        kd = 2.0 * np.sqrt(kp)
        u = kp * (self.waypoint - state.pos) - kd * state.vel
        return saturate(u, self.u_max)
