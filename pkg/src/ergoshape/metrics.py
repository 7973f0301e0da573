"""Estimation-quality metrics and the per-run metrics log."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from .errors import ValidationError
from .measurements import MeasurementSet
from .shapes import World

DETECTION_DELTA = 1e-5


def symmetric_difference(
    est_mask: NDArray, true_mask: NDArray, cell_volume: float
) -> float:
    """Volume of the symmetric difference between two interior masks."""
    est = np.asarray(est_mask, dtype=bool)
    true = np.asarray(true_mask, dtype=bool)
    if est.shape != true.shape:
        raise ValidationError(
            f"mask shapes differ: {est.shape} vs {true.shape}"
        )
    if cell_volume <= 0:
        raise ValidationError(f"cell_volume must be positive, got {cell_volume}")
    return float(np.count_nonzero(est ^ true) * cell_volume)


def area_error(est_mask: NDArray, true_mask: NDArray) -> float:
    """Relative interior-volume error ``|est - true| / true``."""
    est = np.asarray(est_mask, dtype=bool)
    true = np.asarray(true_mask, dtype=bool)
    if est.shape != true.shape:
        raise ValidationError(
            f"mask shapes differ: {est.shape} vs {true.shape}"
        )
    n_true = int(np.count_nonzero(true))
    if n_true == 0:
        raise ValidationError("true interior is empty; area error is undefined")
    return abs(int(np.count_nonzero(est)) - n_true) / n_true


def detection_count(
    data: MeasurementSet, world: World, delta: float = DETECTION_DELTA
) -> int:
    """Number of shapes with at least one contact on their own surface.

    A contact measurement detects shape ``s`` when it lies within ``delta``
    of that shape's boundary; contacts resting on one shape do not count
    for its neighbors.
    """
    return int(np.count_nonzero(detection_flags(data, world, delta)))


def detection_flags(
    data: MeasurementSet, world: World, delta: float = DETECTION_DELTA
) -> NDArray[np.bool_]:
    """Per-shape detection flags for a measurement log."""
    flags = np.zeros(len(world.shapes), dtype=bool)
    y = data.labels
    contacts = data.points[y == 1]
    if contacts.shape[0] == 0 or not world.shapes:
        return flags
    vals = world.values(contacts)  # (n_shapes, n_contacts)
    return (np.abs(vals) <= delta).any(axis=1)


class MetricsLog:
    """Strictly ordered time series of per-run quality metrics."""

    FIELDS = ("t", "ergodic", "gamma", "area_error", "detected", "contacts")

    def __init__(self):
        self.rows: list[dict] = []

    def append(
        self,
        t: float,
        ergodic: float,
        gamma: float,
        area_err: float | None,
        detected: int,
        contacts: int,
    ) -> None:
        if self.rows and t <= self.rows[-1]["t"]:
            raise ValidationError(
                f"metrics timestamps must increase ({t} after {self.rows[-1]['t']})"
            )
        self.rows.append(
            {
                "t": float(t),
                "ergodic": float(ergodic),
                "gamma": float(gamma),
                "area_error": None if area_err is None else float(area_err),
                "detected": int(detected),
                "contacts": int(contacts),
            }
        )

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list:
        if name not in self.FIELDS:
            raise ValidationError(f"unknown metrics field {name!r}")
        return [row[name] for row in self.rows]

    def to_list(self) -> list[dict]:
        return [dict(row) for row in self.rows]

    @classmethod
    def from_list(cls, rows: list[dict]) -> "MetricsLog":
        log = cls()
        for row in rows:
            log.append(
                row["t"],
                row["ergodic"],
                row["gamma"],
                row.get("area_error"),
                row.get("detected", 0),
                row.get("contacts", 0),
            )
        return log
