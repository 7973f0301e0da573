"""Midpoint grids over the unit box used for quadrature and rasterization."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from .errors import ValidationError


class BoxGrid:
    """Uniform cell-centered grid on ``[0, 1]^dim``.

    The grid has ``resolution`` cells per axis; cell centers sit at
    ``(i + 0.5) / resolution``.  Flattened arrays are row-major (C order)
    over the axes in order, i.e. the first coordinate varies slowest.

    Parameters
    ----------
    resolution : int
        Number of cells along each axis (>= 2).
    dim : int
        Spatial dimension, 2 or 3.
    """

    def __init__(self, resolution: int, dim: int):
        if dim not in (2, 3):
            raise ValidationError(f"grid dimension must be 2 or 3, got {dim}")
        if not isinstance(resolution, (int, np.integer)) or resolution < 2:
            raise ValidationError(
                f"grid resolution must be an integer >= 2, got {resolution!r}"
            )
        self.resolution = int(resolution)
        self.dim = int(dim)
        self.shape = (self.resolution,) * self.dim
        self.size = self.resolution**self.dim
        self.cell_width = 1.0 / self.resolution
        self.cell_volume = self.cell_width**self.dim
        self.axis_centers = (np.arange(self.resolution) + 0.5) * self.cell_width
        mesh = np.meshgrid(*([self.axis_centers] * self.dim), indexing="ij")
        self.centers: NDArray[np.float64] = np.stack(
            [m.reshape(-1) for m in mesh], axis=-1
        )

    def reshape(self, flat: NDArray) -> NDArray:
        """View a flattened per-cell array with the grid's shape."""
        flat = np.asarray(flat)
        if flat.shape[0] != self.size:
            raise ValidationError(
                f"expected {self.size} cells, got array of length {flat.shape[0]}"
            )
        return flat.reshape(self.shape)


def check_in_box(x: NDArray, *, name: str = "x") -> NDArray[np.float64]:
    """Validate that a point (or batch of points) lies in the closed unit box.

    Returns the input as a float array.  Raises :class:`DomainError` if any
    coordinate is outside ``[0, 1]`` or non-finite.
    """
    from .errors import DomainError

    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite coordinates")
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise DomainError(f"{name} has coordinates outside the unit box [0, 1]")
    return arr
