"""Closed-loop trials: sense, refit, retarget, steer, and log.

One trial advances the sensor with the chosen steering policy, records
binary contact measurements, refits the boundary estimator on a fixed
cadence, and rebuilds the exploration target from the refreshed model.
Everything a run produces (trajectory, measurement log, metric rows,
posterior snapshots) is returned in memory and, when an output directory
is given, written to plain files with deterministic content.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from .baseline import GeerPolicy
from .basis import ModeBasis, TrajectoryAverager, ergodic_metric
from .controller import ActionSchedule, esac_step
from .dynamics import (
    CONTACT_TOL,
    DoubleIntegrator,
    SensorState,
    resolve_collision,
    saturate,
)
from .errors import (
    CalibrationError,
    EstimatorError,
    NotFittableError,
    SimulationError,
    ValidationError,
)
from .estimators import (
    GaussianProcessBoundary,
    RbfBoundaryClassifier,
    TargetDistribution,
    build_target,
    uniform_target,
)
from .grid import BoxGrid
from .measurements import MeasurementSet, decimate
from .metrics import DETECTION_DELTA, MetricsLog, area_error, symmetric_difference
from .scenario import Scenario
from .shapes import World, interior_mask

START_CLEARANCE = 0.05
START_JITTER = 1e-6


@dataclass
class Snapshot:
    """Posterior and decision fields on the evaluation grid at one time."""

    t: float
    posterior: NDArray[np.float64]
    decision: NDArray[np.float64]


@dataclass
class RunResult:
    """Everything produced by one closed-loop trial."""

    scenario: Scenario
    trial_index: int
    start: NDArray[np.float64]
    metrics: MetricsLog
    data: MeasurementSet
    trajectory: NDArray[np.float64]  # rows: t, pos..., vel..., u...
    snapshots: list[Snapshot] = field(default_factory=list)
    detection_times: list[float | None] = field(default_factory=list)
    first_contact_time: float | None = None
    estimator: object | None = None
    target: TargetDistribution | None = None

    @property
    def all_detected_time(self) -> float | None:
        if not self.detection_times or any(t is None for t in self.detection_times):
            return None
        return max(self.detection_times)


def sample_start(world: World, rng: np.random.Generator) -> NDArray[np.float64]:
    """Uniform free-space start with clearance from every shape."""
    for _ in range(10_000):
        cand = rng.uniform(size=world.dim)
        if world.min_value(cand[None, :])[0] >= START_CLEARANCE:
            return cand
    raise SimulationError("could not sample a free start position")


def _jittered_start(
    scenario: Scenario, world: World, rng: np.random.Generator
) -> NDArray[np.float64]:
    if scenario.start is not None:
        base = np.asarray(scenario.start, dtype=float)
        if world.min_value(base[None, :])[0] <= 0.0:
            raise ValidationError("scenario.start: lies inside a shape")
    else:
        base = sample_start(world, rng)
    step = rng.standard_normal(world.dim)
    step *= START_JITTER / np.linalg.norm(step)
    return np.clip(base + step, 0.0, 1.0)


class _ModelState:
    """Current estimator + target, refit bookkeeping, and training set."""

    def __init__(self, scenario: Scenario, grid: BoxGrid, basis: ModeBasis):
        self.cfg = scenario.estimator_params
        self.kind = scenario.estimator
        self.grid = grid
        self.basis = basis
        self.train = MeasurementSet(scenario.dimension)
        self.alpha: list[float] = []
        self.estimator = None
        self.target = uniform_target(grid, basis)
        self.last_attempt = -np.inf
        self.new_points = 0
        self.version = 0

    def record(self, t: float, x: NDArray, label: int) -> None:
        self.train.append(t, x, label)
        self.alpha.append(0.0)
        self.new_points += 1

    def due(self, t: float) -> bool:
        if len(self.train) == 0:
            return False
        return (
            t - self.last_attempt >= self.cfg.refit_interval
            or self.new_points >= self.cfg.refit_count
        )

    def refit(self, t: float) -> None:
        """Refit on the decimated training set; keep the old model on failure."""
        self.last_attempt = t
        self.new_points = 0
        reduced, survivors = decimate(
            self.train, self.cfg.contact_cap, self.cfg.free_cap, self.cfg.thin_cell
        )
        try:
            if self.kind == "svm":
                clf = RbfBoundaryClassifier(sigma=self.cfg.sigma, C=self.cfg.C)
                warm = np.asarray([self.alpha[i] for i in survivors])
                clf.fit(reduced.points, reduced.labels, alpha0=warm)
                clf.calibrate(reduced.points, reduced.labels)
                self.train = reduced
                self.alpha = clf.alpha_input_order_.tolist()
                self.estimator = clf
            else:
                gp = GaussianProcessBoundary(sigma=self.cfg.sigma, noise=self.cfg.noise)
                gp.fit(reduced.points, reduced.labels)
                self.train = reduced
                self.alpha = [0.0] * len(reduced)
                self.estimator = gp
        except (NotFittableError, CalibrationError, EstimatorError):
            return
        self.target = build_target(self.estimator, self.grid, self.basis,
                                   epsilon=self.cfg.epsilon)
        self.version += 1

    def fields(self) -> tuple[NDArray, NDArray]:
        """Posterior and decision values on the grid (priors if no model)."""
        if self.estimator is None:
            return (
                np.full(self.grid.size, 0.5),
                np.ones(self.grid.size),
            )
        decision = np.asarray(self.estimator.boundary_values(self.grid.centers))
        posterior = np.asarray(self.estimator.target_weight(self.grid.centers))
        return posterior, decision

    def interior(self) -> NDArray[np.bool_]:
        if self.estimator is None:
            return np.zeros(self.grid.size, dtype=bool)
        return np.asarray(self.estimator.boundary_values(self.grid.centers)) <= 0.0


def run_trial(
    scenario: Scenario,
    trial_index: int = 0,
    out_dir: str | Path | None = None,
) -> RunResult:
    """Run one closed-loop trial and optionally write its outputs."""
    scenario.validate()
    world = scenario.build_world()
    dim = scenario.dimension
    basis = ModeBasis(dim, scenario.k_max)
    grid = BoxGrid(scenario.resolution, dim)
    dyn = DoubleIntegrator(dim)
    params = scenario.control
    rng = np.random.default_rng([scenario.seed, trial_index])

    start = _jittered_start(scenario, world, rng)
    state = SensorState(start.copy(), np.zeros(dim))
    averager = TrajectoryAverager(basis, start)
    model = _ModelState(scenario, grid, basis)
    policy = (
        GeerPolicy(scenario.baseline, dim, params.u_max, rng)
        if scenario.policy == "geer"
        else None
    )

    dt = params.dt
    window = params.window_steps
    n_steps = int(round(scenario.duration / dt))
    metrics_every = int(round(scenario.outputs.metrics_interval / dt))
    snapshot_steps = {int(round(t / dt)): t for t in scenario.outputs.snapshot_times}

    data = MeasurementSet(dim)
    metrics = MetricsLog()
    true_mask = interior_mask(world, grid).ravel()
    has_truth = bool(true_mask.any())
    detection_times: list[float | None] = [None] * len(world.shapes)
    first_contact: float | None = None
    contacts = 0
    snapshots: list[Snapshot] = []
    cached_interior = model.interior()
    cached_version = model.version

    traj = np.empty((n_steps + 1, 1 + 3 * dim))
    traj[0] = np.concatenate(([0.0], start, np.zeros(dim), np.zeros(dim)))

    schedule: ActionSchedule | None = None

    def record_metrics(t: float) -> None:
        nonlocal cached_interior, cached_version
        if model.version != cached_version:
            cached_interior = model.interior()
            cached_version = model.version
        erg = ergodic_metric(averager.coeffs, model.target.coeffs, basis)
        gamma = symmetric_difference(cached_interior, true_mask, grid.cell_volume)
        err = area_error(cached_interior, true_mask) if has_truth else None
        metrics.append(t, erg, gamma, err, sum(x is not None for x in detection_times),
                       contacts)

    def take_snapshot(t: float) -> None:
        posterior, decision = model.fields()
        snapshots.append(Snapshot(t, posterior, decision))

    for i in range(n_steps):
        t = i * dt
        if i % metrics_every == 0:
            record_metrics(t)
        if i % window == 0:
            # sense -> refit -> retarget -> steer, in that order.  A sensor
            # resting on the surface (within the contact tolerance) is
            # touching, even if the resolved position rounds slightly outside.
            phi_here = float(world.min_value(state.pos[None, :])[0])
            label = int(phi_here <= CONTACT_TOL)
            data.append(t, state.pos, label)
            model.record(t, state.pos, label)
            if model.due(t):
                model.refit(t)
            if i in snapshot_steps:
                take_snapshot(snapshot_steps[i])
            if policy is not None:
                u = policy.control(state, model.estimator, t)
                schedule = ActionSchedule(np.array([t]), u[None, :])
            else:
                schedule = esac_step(
                    state, averager, model.target.coeffs, basis, params, dyn, t0=t
                )
        u = saturate(schedule.at_step(i % window), params.u_max)
        proposed = dyn.rk4_step(state, u, dt)
        result = resolve_collision(state, proposed, world, (i + 1) * dt)
        state = result.state
        if result.contact is not None:
            contacts += 1
            point = result.contact.point
            data.append(result.contact.time, point, 1)
            model.record(result.contact.time, point, 1)
            if first_contact is None:
                first_contact = result.contact.time
            phi = np.abs(world.values(point[None, :])[:, 0])
            for s in np.flatnonzero(phi <= DETECTION_DELTA):
                if detection_times[s] is None:
                    detection_times[s] = result.contact.time
        averager.update(state.pos, dt)
        traj[i + 1] = np.concatenate(([(i + 1) * dt], state.pos, state.vel, u))

    record_metrics(scenario.duration)
    if n_steps in snapshot_steps:
        take_snapshot(snapshot_steps[n_steps])

    result = RunResult(
        scenario=scenario,
        trial_index=trial_index,
        start=start,
        metrics=metrics,
        data=data,
        trajectory=traj,
        snapshots=snapshots,
        detection_times=detection_times,
        first_contact_time=first_contact,
        estimator=model.estimator,
        target=model.target,
    )
    if out_dir is not None:
        write_outputs(result, Path(out_dir))
    return result


# ---------------------------------------------------------------------------
# output files


def _fmt(x: float) -> str:
    return repr(float(x))


def write_outputs(result: RunResult, out_dir: Path) -> None:
    """Write one trial's outputs below ``out_dir`` (created if missing)."""
    out_dir.mkdir(parents=True, exist_ok=True)
    dim = result.scenario.dimension
    axes = ["x", "y", "z"][:dim]

    header = (
        ["t"] + axes + [f"v{a}" for a in axes] + [f"u{a}" for a in axes]
    )
    lines = [",".join(header)]
    for row in result.trajectory:
        lines.append(",".join(_fmt(v) for v in row))
    (out_dir / "trajectory.csv").write_text("\n".join(lines) + "\n")

    lines = [",".join(["t"] + axes + ["label"])]
    times, pts, labels = result.data.times, result.data.points, result.data.labels
    for k in range(len(result.data)):
        vals = [_fmt(times[k])] + [_fmt(v) for v in pts[k]] + [str(int(labels[k]))]
        lines.append(",".join(vals))
    (out_dir / "measurements.csv").write_text("\n".join(lines) + "\n")

    for snap in result.snapshots:
        write_snapshot(snap, result.scenario, out_dir / f"snapshot_t{snap.t:.2f}.txt")

    doc = {
        "scenario": result.scenario.to_dict(),
        "trial_index": result.trial_index,
        "seed_sequence": [result.scenario.seed, result.trial_index],
        "start": [float(v) for v in result.start],
        "fields": list(MetricsLog.FIELDS),
        "rows": result.metrics.to_list(),
        "detection_times": list(result.detection_times),
        "all_detected_time": result.all_detected_time,
        "first_contact_time": result.first_contact_time,
        "final": result.metrics.rows[-1],
        "snapshot_times": [s.t for s in result.snapshots],
    }
    (out_dir / "metrics.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    (out_dir / "scenario.json").write_text(
        json.dumps(result.scenario.to_dict(), indent=2, sort_keys=True) + "\n"
    )


def write_snapshot(snap: Snapshot, scenario: Scenario, path: Path) -> None:
    """Plain-text grid dump: one header line, then one ``posterior decision``
    pair per cell in C order (first axis slowest)."""
    res = scenario.resolution
    dim = scenario.dimension
    axes = ",".join(["x", "y", "z"][:dim])
    head = (
        f"# posterior_snapshot t={snap.t:.2f} dim={dim} res={res} "
        f"extent=unit order=C axes={axes} fields=posterior,decision"
    )
    lines = [head]
    for p, d in zip(snap.posterior, snap.decision):
        lines.append(f"{_fmt(p)} {_fmt(d)}")
    path.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# batches


def run_batch(
    scenario: Scenario,
    trials: int,
    policies: tuple[str, ...] = ("esac", "geer"),
    out_dir: str | Path | None = None,
) -> dict:
    """Run ``trials`` sampled-start trials per policy and summarize.

    Trial k uses the seed sequence ``[scenario.seed, k]`` under every
    policy, so arms share initial conditions.  A trial that raises is
    recorded with its error message and the batch continues.
    """
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    for p in policies:
        if p not in ("esac", "geer"):
            raise ValidationError(f"unknown policy {p!r}")
    base = replace(scenario, start=None)
    root = Path(out_dir) if out_dir is not None else None
    summary: dict = {"scenario": base.to_dict(), "trials": trials, "arms": {}}
    for policy in policies:
        arm_rows = []
        for k in range(trials):
            scn = base.with_policy(policy)
            trial_dir = root / policy / f"trial_{k:03d}" if root is not None else None
            row: dict = {"trial": k, "seed_sequence": [scn.seed, k]}
            try:
                res = run_trial(scn, trial_index=k, out_dir=trial_dir)
            except Exception as exc:  # noqa: BLE001 - keep the batch running
                row["error"] = f"{type(exc).__name__}: {exc}"
            else:
                row.update(
                    start=[float(v) for v in res.start],
                    final=res.metrics.rows[-1],
                    detection_times=list(res.detection_times),
                    all_detected_time=res.all_detected_time,
                    first_contact_time=res.first_contact_time,
                )
            arm_rows.append(row)
        summary["arms"][policy] = arm_rows
    if root is not None:
        root.mkdir(parents=True, exist_ok=True)
        (root / "summary.json").write_text(
            json.dumps(summary, indent=2, sort_keys=True) + "\n"
        )
    return summary
