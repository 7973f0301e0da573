"""Ergodic tactile exploration with binary contact sensing.

A point sensor sweeps a unit workspace, steered so that its time-averaged
trajectory statistics track an exploration target.  Binary touch/no-touch
measurements feed a kernel boundary estimator whose collision posterior
becomes the next exploration target, closing the loop on shape estimation
without a parametric model of the object.
"""

from .baseline import GeerParams, GeerPolicy
from .basis import ModeBasis, TrajectoryAverager, ergodic_metric
from .controller import EsacParams, esac_step
from .dynamics import DoubleIntegrator, SensorState, resolve_collision
from .errors import (
    CalibrationError,
    DomainError,
    EstimatorError,
    NotFittableError,
    SimulationError,
    ValidationError,
)
from .estimators import (
    GaussianProcessBoundary,
    PlattCalibration,
    RbfBoundaryClassifier,
    TargetDistribution,
    build_target,
    uniform_target,
)
from .grid import BoxGrid
from .measurements import MeasurementSet, decimate
from .metrics import MetricsLog, area_error, detection_count, symmetric_difference
from .scenario import Scenario, builtin_scenarios, load_scenario, scenario_from_dict
from .shapes import World, make_shape, measure
from .simulate import RunResult, run_batch, run_trial

__version__ = "0.1.0"

__all__ = [
    "BoxGrid",
    "CalibrationError",
    "DomainError",
    "DoubleIntegrator",
    "EsacParams",
    "EstimatorError",
    "GaussianProcessBoundary",
    "GeerParams",
    "GeerPolicy",
    "MeasurementSet",
    "MetricsLog",
    "ModeBasis",
    "NotFittableError",
    "PlattCalibration",
    "RbfBoundaryClassifier",
    "RunResult",
    "Scenario",
    "SensorState",
    "SimulationError",
    "TargetDistribution",
    "TrajectoryAverager",
    "ValidationError",
    "World",
    "area_error",
    "build_target",
    "builtin_scenarios",
    "decimate",
    "detection_count",
    "ergodic_metric",
    "esac_step",
    "load_scenario",
    "make_shape",
    "measure",
    "resolve_collision",
    "run_batch",
    "run_trial",
    "scenario_from_dict",
    "symmetric_difference",
    "uniform_target",
    "__version__",
]
