"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when a scenario, shape, or other input fails validation."""


class DomainError(ValueError):
    """Raised when a query point lies outside the closed unit box."""


class NotFittableError(RuntimeError):
    """Raised when the measurement set cannot support a boundary fit.

    Typical cause: every recorded label belongs to a single class, so there
    is no boundary to separate.
    """


class CalibrationError(RuntimeError):
    """Raised when sigmoid calibration of decision values fails to converge."""


class EstimatorError(RuntimeError):
    """Raised when a fitted estimator is unusable (e.g. a kernel matrix
    cannot be factorized even after jitter retries)."""


class SimulationError(RuntimeError):
    """Raised when a simulation invariant is violated, such as the sensor
    starting a step inside an obstacle."""
