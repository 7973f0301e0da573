"""Storage and decimation of binary contact measurements."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from .errors import ValidationError


class MeasurementSet:
    """Time-stamped positions with binary contact labels.

    Labels are 1 for contact (the point touched a shape surface or
    interior) and 0 for free space.
    """

    def __init__(self, dim: int):
        if dim not in (2, 3):
            raise ValidationError(f"measurement dimension must be 2 or 3, got {dim}")
        self.dim = int(dim)
        self._t: list[float] = []
        self._x: list[NDArray[np.float64]] = []
        self._y: list[int] = []

    def append(self, t: float, x: NDArray, label: int) -> None:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValidationError(f"position must have shape ({self.dim},)")
        if label not in (0, 1):
            raise ValidationError(f"label must be 0 or 1, got {label!r}")
        if self._t and t < self._t[-1]:
            raise ValidationError(
                f"timestamps must be non-decreasing ({t} after {self._t[-1]})"
            )
        self._t.append(float(t))
        self._x.append(x.copy())
        self._y.append(int(label))

    def __len__(self) -> int:
        return len(self._t)

    @property
    def times(self) -> NDArray[np.float64]:
        return np.asarray(self._t, dtype=float)

    @property
    def points(self) -> NDArray[np.float64]:
        if not self._x:
            return np.empty((0, self.dim))
        return np.stack(self._x)

    @property
    def labels(self) -> NDArray[np.int_]:
        return np.asarray(self._y, dtype=int)

    def counts(self) -> tuple[int, int]:
        """(free count, contact count)."""
        y = self.labels
        return int(np.sum(y == 0)), int(np.sum(y == 1))

    def subset(self, indices: NDArray) -> "MeasurementSet":
        out = MeasurementSet(self.dim)
        for i in np.asarray(indices, dtype=int):
            out._t.append(self._t[i])
            out._x.append(self._x[i])
            out._y.append(self._y[i])
        return out


def _thin_on_grid(points: NDArray, order: NDArray, cell: float) -> list[int]:
    """Keep the most recent point per spatial cell; returns kept positions
    within ``order`` (which must be oldest-to-newest)."""
    kept: dict[tuple, int] = {}
    for idx in order:
        key = tuple(np.minimum((points[idx] / cell).astype(int), int(1.0 / cell)))
        kept[key] = idx  # later (newer) entries overwrite older ones
    return sorted(kept.values())


def decimate(
    data: MeasurementSet,
    contact_cap: int = 400,
    free_cap: int = 1600,
    cell: float = 0.02,
) -> tuple[MeasurementSet, NDArray[np.int_]]:
    """Bound the training set size while keeping surface detail.

    Contact points are all kept while under their cap.  Over the cap, one
    anchor per ``cell``-sized bin (the most recent) is kept so the traced
    surface never loses coverage, and the remaining budget is refilled
    with the most recent other contacts.  Free points are thinned to the
    most recent per cell once over their cap, then truncated to the most
    recent ``free_cap``.  Survivors keep their original time order.
    Returns the reduced set and the surviving indices into ``data``.
    """
    if contact_cap < 1 or free_cap < 1:
        raise ValidationError("decimation caps must be >= 1")
    if not 0 < cell < 1:
        raise ValidationError(f"cell size must be in (0, 1), got {cell}")
    y = data.labels
    pts = data.points
    keep: list[int] = []

    idx = np.flatnonzero(y == 1)
    if idx.size > contact_cap:
        anchors = _thin_on_grid(pts, idx, cell)
        if len(anchors) >= contact_cap:
            idx = np.sort(np.asarray(anchors, dtype=int)[-contact_cap:])
        else:
            chosen = set(anchors)
            for j in idx[::-1]:
                if len(chosen) >= contact_cap:
                    break
                chosen.add(int(j))
            idx = np.asarray(sorted(chosen), dtype=int)
    keep.extend(idx.tolist())

    idx = np.flatnonzero(y == 0)
    if idx.size > free_cap:
        idx = np.asarray(_thin_on_grid(pts, idx, cell), dtype=int)
        if idx.size > free_cap:
            idx = np.sort(idx[-free_cap:])
    keep.extend(idx.tolist())

    survivors = np.asarray(sorted(keep), dtype=int)
    return data.subset(survivors), survivors
