"""Scenario configuration: schema, validation, defaults, and fixtures.

A scenario is a plain JSON document; parsing is strict (unknown keys are
rejected with their path) and every omitted field gets a documented
default, so the resolved scenario echoed next to a run's outputs fully
reproduces it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from .baseline import GeerParams
from .controller import EsacParams
from .errors import ValidationError
from .shapes import World, make_shape

POLICIES = ("esac", "geer")
ESTIMATORS = ("svm", "gp")


def _require(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise ValidationError(f"{path}: {message}")


def _pop_section(raw: dict, key: str, path: str) -> dict:
    section = raw.pop(key, {})
    _require(isinstance(section, dict), f"{path}.{key}", "must be an object")
    return dict(section)


def _no_leftovers(raw: dict, path: str) -> None:
    if raw:
        raise ValidationError(f"{path}: unknown keys {sorted(raw)}")


def _number(raw: dict, key: str, default, path: str, *, positive=False):
    val = raw.pop(key, default)
    _require(isinstance(val, (int, float)) and not isinstance(val, bool),
             f"{path}.{key}", f"must be a number, got {val!r}")
    if positive:
        _require(val > 0, f"{path}.{key}", f"must be positive, got {val}")
    return float(val)


def _integer(raw: dict, key: str, default, path: str, *, minimum=None):
    val = raw.pop(key, default)
    _require(isinstance(val, int) and not isinstance(val, bool),
             f"{path}.{key}", f"must be an integer, got {val!r}")
    if minimum is not None:
        _require(val >= minimum, f"{path}.{key}", f"must be >= {minimum}")
    return int(val)


def _vector(raw: dict, key: str, default, dim: int, path: str):
    val = raw.pop(key, default)
    if val is None:
        return None
    _require(
        isinstance(val, (list, tuple)) and len(val) == dim
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in val),
        f"{path}.{key}", f"must be a list of {dim} numbers",
    )
    return tuple(float(v) for v in val)


def _multiple_of(value: float, base: float) -> bool:
    ratio = value / base
    return abs(ratio - round(ratio)) < 1e-9


@dataclass
class EstimatorConfig:
    """Estimator, calibration, target, and training-set bookkeeping knobs."""

    sigma: float = 0.08
    C: float = 10.0
    noise: float = 0.01
    refit_interval: float = 0.5
    refit_count: int = 25
    contact_cap: int = 400
    free_cap: int = 1600
    thin_cell: float = 0.02
    epsilon: float = 1e-3

    def validate(self, path: str = "estimator_params") -> None:
        _require(self.sigma > 0, f"{path}.sigma", "must be positive")
        _require(self.C > 0, f"{path}.C", "must be positive")
        _require(self.noise > 0, f"{path}.noise", "must be positive")
        _require(self.refit_interval > 0, f"{path}.refit_interval", "must be positive")
        _require(self.refit_count >= 1, f"{path}.refit_count", "must be >= 1")
        _require(self.contact_cap >= 1, f"{path}.contact_cap", "must be >= 1")
        _require(self.free_cap >= 1, f"{path}.free_cap", "must be >= 1")
        _require(0 < self.thin_cell < 1, f"{path}.thin_cell", "must be in (0, 1)")
        _require(0 < self.epsilon < 1, f"{path}.epsilon", "must be in (0, 1)")


@dataclass
class OutputConfig:
    metrics_interval: float = 0.5
    snapshot_times: tuple[float, ...] = ()


@dataclass
class Scenario:
    """One fully resolved experiment description."""

    name: str
    dimension: int
    duration: float
    seed: int = 0
    policy: str = "esac"
    estimator: str = "svm"
    start: tuple[float, ...] | None = None
    shapes: tuple[dict, ...] = ()
    control: EsacParams = field(default_factory=EsacParams)
    baseline: GeerParams = field(default_factory=GeerParams)
    k_max: int = 10
    resolution: int = 64
    estimator_params: EstimatorConfig = field(default_factory=EstimatorConfig)
    outputs: OutputConfig = field(default_factory=OutputConfig)

    def build_world(self) -> World:
        return World([make_shape(s) for s in self.shapes], dim=self.dimension)

    def validate(self) -> None:
        path = "scenario"
        _require(self.dimension in (2, 3), f"{path}.dimension", "must be 2 or 3")
        _require(self.duration > 0, f"{path}.duration", "must be positive")
        _require(self.policy in POLICIES, f"{path}.policy", f"must be one of {POLICIES}")
        _require(
            self.estimator in ESTIMATORS,
            f"{path}.estimator", f"must be one of {ESTIMATORS}",
        )
        _require(self.seed >= 0, f"{path}.seed", "must be >= 0")
        _require(self.k_max >= 1, f"{path}.k_max", "must be >= 1")
        _require(self.resolution >= 8, f"{path}.resolution", "must be >= 8")
        dt = self.control.dt
        _require(
            _multiple_of(self.duration, self.control.t_s),
            f"{path}.duration", "must be a multiple of control.t_s",
        )
        _require(
            _multiple_of(self.outputs.metrics_interval, dt)
            and self.outputs.metrics_interval > 0,
            f"{path}.outputs.metrics_interval", "must be a positive multiple of dt",
        )
        for t in self.outputs.snapshot_times:
            _require(
                0 <= t <= self.duration and _multiple_of(t, self.control.t_s),
                f"{path}.outputs.snapshot_times",
                f"time {t} must lie in [0, duration] and be a multiple of t_s",
            )
        _require(
            len(self.control.r_diag) == self.dimension,
            f"{path}.control.r_diag", "length must match the dimension",
        )
        if self.start is not None:
            _require(
                len(self.start) == self.dimension,
                f"{path}.start", "length must match the dimension",
            )
            _require(
                all(0.0 <= s <= 1.0 for s in self.start),
                f"{path}.start", "must lie in the unit box",
            )
        self.estimator_params.validate()
        # shape construction + placement/clearance rules
        self.build_world()

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "dimension": self.dimension,
            "duration": self.duration,
            "seed": self.seed,
            "policy": self.policy,
            "estimator": self.estimator,
            "start": None if self.start is None else list(self.start),
            "shapes": [dict(s) for s in self.shapes],
            "control": {
                "q": self.control.q,
                "r_diag": list(self.control.r_diag),
                "horizon": self.control.horizon,
                "alpha_d": self.control.alpha_d,
                "t_s": self.control.t_s,
                "dt": self.control.dt,
                "u_max": self.control.u_max,
                "u_default": list(self.control.u_default),
                "grad_margin": self.control.grad_margin,
            },
            "baseline": {
                "candidate_count": self.baseline.candidate_count,
                "radius": self.baseline.radius,
                "waypoint_gain": self.baseline.waypoint_gain,
                "replan_interval": self.baseline.replan_interval,
                "arrive_tol": self.baseline.arrive_tol,
            },
            "basis": {"k_max": self.k_max},
            "grid": {"resolution": self.resolution},
            "estimator_params": {
                "sigma": self.estimator_params.sigma,
                "C": self.estimator_params.C,
                "noise": self.estimator_params.noise,
                "refit_interval": self.estimator_params.refit_interval,
                "refit_count": self.estimator_params.refit_count,
                "contact_cap": self.estimator_params.contact_cap,
                "free_cap": self.estimator_params.free_cap,
                "thin_cell": self.estimator_params.thin_cell,
                "epsilon": self.estimator_params.epsilon,
            },
            "outputs": {
                "metrics_interval": self.outputs.metrics_interval,
                "snapshot_times": list(self.outputs.snapshot_times),
            },
        }

    def with_policy(self, policy: str) -> "Scenario":
        return replace(self, policy=policy)


def scenario_from_dict(doc: dict, name_hint: str = "scenario") -> Scenario:
    """Parse and validate a scenario document."""
    _require(isinstance(doc, dict), "scenario", "must be a JSON object")
    raw = dict(doc)
    path = "scenario"

    name = raw.pop("name", name_hint)
    _require(isinstance(name, str) and name, f"{path}.name", "must be a non-empty string")
    dimension = _integer(raw, "dimension", 2, path)
    _require(dimension in (2, 3), f"{path}.dimension", "must be 2 or 3")
    _require("duration" in raw, f"{path}.duration", "is required")
    duration = _number(raw, "duration", None, path, positive=True)
    seed = _integer(raw, "seed", 0, path, minimum=0)
    policy = raw.pop("policy", "esac")
    estimator = raw.pop("estimator", "svm")
    start = _vector(raw, "start", None, dimension, path)

    shapes_raw = raw.pop("shapes", [])
    _require(isinstance(shapes_raw, list), f"{path}.shapes", "must be a list")
    shapes = []
    for i, s in enumerate(shapes_raw):
        _require(isinstance(s, dict), f"{path}.shapes[{i}]", "must be an object")
        shapes.append(dict(s))

    control_raw = _pop_section(raw, "control", path)
    cpath = f"{path}.control"
    dt = _number(control_raw, "dt", 0.01, cpath, positive=True)
    default_r = tuple([0.01] * dimension)
    default_u = tuple([0.0] * dimension)
    try:
        control = EsacParams(
            q=_number(control_raw, "q", 30.0, cpath, positive=True),
            r_diag=_vector(control_raw, "r_diag", list(default_r), dimension, cpath),
            horizon=_number(control_raw, "horizon", 0.8, cpath, positive=True),
            alpha_d=_number(control_raw, "alpha_d", -555.0, cpath),
            t_s=_number(control_raw, "t_s", 0.05, cpath, positive=True),
            dt=dt,
            u_max=_number(control_raw, "u_max", 10.0, cpath, positive=True),
            u_default=_vector(control_raw, "u_default", list(default_u), dimension, cpath),
            grad_margin=_number(control_raw, "grad_margin", 0.008, cpath),
        )
    except ValidationError as exc:
        raise ValidationError(f"{cpath}: {exc}") from exc
    _no_leftovers(control_raw, cpath)

    baseline_raw = _pop_section(raw, "baseline", path)
    bpath = f"{path}.baseline"
    try:
        baseline = GeerParams(
            candidate_count=_integer(baseline_raw, "candidate_count", 50, bpath),
            radius=_number(baseline_raw, "radius", 0.15, bpath, positive=True),
            waypoint_gain=_number(baseline_raw, "waypoint_gain", 40.0, bpath, positive=True),
            replan_interval=_number(baseline_raw, "replan_interval", 0.5, bpath, positive=True),
            arrive_tol=_number(baseline_raw, "arrive_tol", 0.02, bpath, positive=True),
        )
    except ValidationError as exc:
        raise ValidationError(f"{bpath}: {exc}") from exc
    _no_leftovers(baseline_raw, bpath)

    basis_raw = _pop_section(raw, "basis", path)
    k_max = _integer(basis_raw, "k_max", 10 if dimension == 2 else 6, f"{path}.basis",
                     minimum=1)
    _no_leftovers(basis_raw, f"{path}.basis")

    grid_raw = _pop_section(raw, "grid", path)
    resolution = _integer(grid_raw, "resolution", 64 if dimension == 2 else 32,
                          f"{path}.grid", minimum=8)
    _no_leftovers(grid_raw, f"{path}.grid")

    est_raw = _pop_section(raw, "estimator_params", path)
    epath = f"{path}.estimator_params"
    est = EstimatorConfig(
        sigma=_number(est_raw, "sigma", 0.08, epath, positive=True),
        C=_number(est_raw, "C", 10.0, epath, positive=True),
        noise=_number(est_raw, "noise", 0.01, epath, positive=True),
        refit_interval=_number(est_raw, "refit_interval", 0.5, epath, positive=True),
        refit_count=_integer(est_raw, "refit_count", 25, epath, minimum=1),
        contact_cap=_integer(est_raw, "contact_cap", 400, epath, minimum=1),
        free_cap=_integer(est_raw, "free_cap", 1600, epath, minimum=1),
        thin_cell=_number(est_raw, "thin_cell", 0.02, epath, positive=True),
        epsilon=_number(est_raw, "epsilon", 1e-3, epath, positive=True),
    )
    _no_leftovers(est_raw, epath)

    out_raw = _pop_section(raw, "outputs", path)
    opath = f"{path}.outputs"
    metrics_interval = _number(out_raw, "metrics_interval", 0.5, opath, positive=True)
    if "snapshot_times" in out_raw:
        snaps = out_raw.pop("snapshot_times")
    elif dimension == 2:
        # standard 2D panel times, trimmed to the run length
        snaps = [t for t in (0.1, 1.0, 2.0, 6.0, 11.0, 30.0) if t <= duration]
    else:
        snaps = []
    _require(
        isinstance(snaps, list)
        and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in snaps),
        f"{opath}.snapshot_times", "must be a list of numbers",
    )
    outputs = OutputConfig(
        metrics_interval=metrics_interval,
        snapshot_times=tuple(sorted(float(t) for t in snaps)),
    )
    _no_leftovers(out_raw, opath)

    _no_leftovers(raw, path)

    scn = Scenario(
        name=name,
        dimension=dimension,
        duration=duration,
        seed=seed,
        policy=policy,
        estimator=estimator,
        start=start,
        shapes=tuple(shapes),
        control=control,
        baseline=baseline,
        k_max=k_max,
        resolution=resolution,
        estimator_params=est,
        outputs=outputs,
    )
    scn.validate()
    return scn


def builtin_scenarios() -> list[str]:
    """Names of the scenario fixtures shipped with the package."""
    pkg = resources.files("ergoshape") / "scenarios"
    return sorted(p.name[: -len(".json")] for p in pkg.iterdir() if p.name.endswith(".json"))


def load_scenario(source: str | Path) -> Scenario:
    """Load a scenario from a JSON file path or a built-in fixture name."""
    path = Path(source)
    if path.exists():
        text = path.read_text()
        hint = path.stem
    else:
        pkg = resources.files("ergoshape") / "scenarios" / f"{source}.json"
        if not pkg.is_file():
            raise ValidationError(
                f"{source!r} is neither a file nor a built-in scenario "
                f"(available: {builtin_scenarios()})"
            )
        text = pkg.read_text()
        hint = str(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON in {source}: {exc}") from exc
    return scenario_from_dict(doc, name_hint=hint)
