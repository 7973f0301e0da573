"""Obstacle shapes as signed boundary functions on the unit box.

Each shape exposes a scalar field ``phi`` that is negative inside, zero on
the boundary, and positive outside.  For most shapes ``phi`` is an exact
signed distance; for the clover and sine wall it is a level function with
the same sign convention.  A :class:`World` bundles the shapes in a scene
and enforces placement rules (shapes inside the box with a margin, and a
minimum clearance between shapes).
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from .errors import ValidationError
from .grid import BoxGrid

BOX_MARGIN = 0.02
PAIR_CLEARANCE = 0.02


def _as_points(x: NDArray, dim: int) -> tuple[NDArray[np.float64], bool]:
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise ValidationError(f"expected points of shape (N, {dim}) or ({dim},)")
    return arr, single


class Shape:
    """Base class for signed boundary functions."""

    kind: str = "shape"
    dim: int = 2

    def values(self, x: NDArray) -> NDArray[np.float64]:
        """Signed boundary values for a batch of points, shape (N,)."""
        raise NotImplementedError

    def value(self, x: NDArray) -> float:
        """Signed boundary value at a single point."""
        pts, _ = _as_points(x, self.dim)
        return float(self.values(pts)[0])

    def gradient(self, x: NDArray) -> NDArray[np.float64]:
        """Gradient of ``phi`` at a single point (central differences)."""
        pts, _ = _as_points(x, self.dim)
        x = pts[0]
        eps = 1e-6
        grad = np.empty(self.dim)
        for a in range(self.dim):
            xp = x.copy()
            xm = x.copy()
            xp[a] += eps
            xm[a] -= eps
            grad[a] = (self.value(xp) - self.value(xm)) / (2 * eps)
        return grad

    def check_placement(self) -> None:
        """Raise :class:`ValidationError` unless the shape sits inside the
        unit box with at least ``BOX_MARGIN`` clearance from every wall."""
        lo, hi = self.bounds()
        if np.any(lo < BOX_MARGIN) or np.any(hi > 1.0 - BOX_MARGIN):
            raise ValidationError(
                f"{self.kind} extends within {BOX_MARGIN} of the box walls"
            )

    def bounds(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Axis-aligned bounding box of the interior (lo, hi)."""
        raise NotImplementedError


def _check_center(center, dim) -> NDArray[np.float64]:
    c = np.asarray(center, dtype=float)
    if c.shape != (dim,):
        raise ValidationError(f"center must have shape ({dim},), got {c.shape}")
    return c


class Circle(Shape):
    """Ball in 2-D or 3-D; ``phi`` is the exact signed distance."""

    kind = "circle"

    def __init__(self, center, radius: float, dim: int = 2):
        self.dim = int(dim)
        self.center = _check_center(center, self.dim)
        if not radius > 0:
            raise ValidationError(f"circle radius must be positive, got {radius}")
        self.radius = float(radius)

    def values(self, x):
        pts, _ = _as_points(x, self.dim)
        return np.linalg.norm(pts - self.center, axis=-1) - self.radius

    def gradient(self, x):
        pts, _ = _as_points(x, self.dim)
        d = pts[0] - self.center
        n = np.linalg.norm(d)
        if n < 1e-12:
            return np.zeros(self.dim)
        return d / n

    def bounds(self):
        return self.center - self.radius, self.center + self.radius


class Square(Shape):
    """Axis-aligned box (square in 2-D, cube in 3-D), exact signed distance."""

    kind = "square"

    def __init__(self, center, half_width: float, dim: int = 2):
        self.dim = int(dim)
        self.center = _check_center(center, self.dim)
        if not half_width > 0:
            raise ValidationError(f"square half_width must be positive, got {half_width}")
        self.half_width = float(half_width)

    def values(self, x):
        pts, _ = _as_points(x, self.dim)
        q = np.abs(pts - self.center) - self.half_width
        outside = np.linalg.norm(np.maximum(q, 0.0), axis=-1)
        inside = np.minimum(np.max(q, axis=-1), 0.0)
        return outside + inside

    def bounds(self):
        return self.center - self.half_width, self.center + self.half_width


class Diamond(Shape):
    """Square rotated 45 degrees (2-D); ``half_diag`` is the center-to-vertex
    distance along the axes.  Exact signed distance via the rotated frame."""

    kind = "diamond"

    def __init__(self, center, half_diag: float):
        self.dim = 2
        self.center = _check_center(center, 2)
        if not half_diag > 0:
            raise ValidationError(f"diamond half_diag must be positive, got {half_diag}")
        self.half_diag = float(half_diag)
        s = 1.0 / np.sqrt(2.0)
        self._rot = np.array([[s, s], [-s, s]])  # rotate by -45 deg
        self._half_width = self.half_diag * s

    def values(self, x):
        pts, _ = _as_points(x, 2)
        local = (pts - self.center) @ self._rot.T
        q = np.abs(local) - self._half_width
        outside = np.linalg.norm(np.maximum(q, 0.0), axis=-1)
        inside = np.minimum(np.max(q, axis=-1), 0.0)
        return outside + inside

    def bounds(self):
        return self.center - self.half_diag, self.center + self.half_diag


class Triangle(Shape):
    """Equilateral triangle (2-D) defined by circumradius and rotation.

    ``phi`` is the max over the three edge half-planes (unit normals), an
    exact signed distance inside and near the edges; outside a vertex it
    under-estimates distance slightly but keeps the correct sign.
    """

    kind = "triangle"

    def __init__(self, center, radius: float, rotation: float = 0.0):
        self.dim = 2
        self.center = _check_center(center, 2)
        if not radius > 0:
            raise ValidationError(f"triangle radius must be positive, got {radius}")
        self.radius = float(radius)
        self.rotation = float(rotation)
        angles = self.rotation + np.pi / 2 + np.array([0.0, 2, 4]) * np.pi / 3
        self.vertices = self.center + self.radius * np.stack(
            [np.cos(angles), np.sin(angles)], axis=-1
        )
        # outward unit normal and offset for each edge
        normals = []
        offsets = []
        for i in range(3):
            a = self.vertices[i]
            b = self.vertices[(i + 1) % 3]
            edge = b - a
            n = np.array([edge[1], -edge[0]])
            n = n / np.linalg.norm(n)
            if np.dot(n, a - self.center) < 0:
                n = -n
            normals.append(n)
            offsets.append(np.dot(n, a))
        self._normals = np.stack(normals)
        self._offsets = np.asarray(offsets)

    def values(self, x):
        pts, _ = _as_points(x, 2)
        return np.max(pts @ self._normals.T - self._offsets, axis=-1)

    def bounds(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)


class Clover(Shape):
    """Four-lobed blob (2-D): ``phi = ||x - c|| - (a + b cos(4 theta))``.

    A level function, not a true distance, but the gradient magnitude stays
    close to one for the small lobe amplitudes used here.
    """

    kind = "clover"

    def __init__(self, center, mean_radius: float, lobe: float):
        self.dim = 2
        self.center = _check_center(center, 2)
        if not mean_radius > 0:
            raise ValidationError(f"clover mean_radius must be positive, got {mean_radius}")
        if not 0 <= lobe < mean_radius:
            raise ValidationError(
                f"clover lobe must satisfy 0 <= lobe < mean_radius, got {lobe}"
            )
        self.mean_radius = float(mean_radius)
        self.lobe = float(lobe)

    def values(self, x):
        pts, _ = _as_points(x, 2)
        d = pts - self.center
        r = np.linalg.norm(d, axis=-1)
        theta = np.arctan2(d[:, 1], d[:, 0])
        return r - (self.mean_radius + self.lobe * np.cos(4.0 * theta))

    def bounds(self):
        reach = self.mean_radius + self.lobe
        return self.center - reach, self.center + reach


class SineWall(Shape):
    """Region below a sinusoidal curve (2-D): ``phi = y - (y0 + A sin(2 pi f x))``.

    The interior hugs the bottom of the box by construction, so this shape
    is exempt from the wall-margin rule; only the curve itself must stay
    inside the box.
    """

    kind = "sine_wall"

    def __init__(self, y0: float, amplitude: float, frequency: float):
        self.dim = 2
        if not 0 < y0 < 1:
            raise ValidationError(f"sine wall y0 must be in (0, 1), got {y0}")
        if not amplitude >= 0:
            raise ValidationError(f"sine wall amplitude must be >= 0, got {amplitude}")
        if not frequency > 0:
            raise ValidationError(f"sine wall frequency must be positive, got {frequency}")
        self.y0 = float(y0)
        self.amplitude = float(amplitude)
        self.frequency = float(frequency)

    def values(self, x):
        pts, _ = _as_points(x, 2)
        curve = self.y0 + self.amplitude * np.sin(2 * np.pi * self.frequency * pts[:, 0])
        return pts[:, 1] - curve

    def gradient(self, x):
        pts, _ = _as_points(x, 2)
        x0 = pts[0, 0]
        slope = (
            2 * np.pi * self.frequency * self.amplitude
            * np.cos(2 * np.pi * self.frequency * x0)
        )
        return np.array([-slope, 1.0])

    def check_placement(self):
        lo = self.y0 - self.amplitude
        hi = self.y0 + self.amplitude
        if lo < BOX_MARGIN or hi > 1.0 - BOX_MARGIN:
            raise ValidationError(
                f"sine wall curve leaves the box margin (range [{lo:.3f}, {hi:.3f}])"
            )

    def bounds(self):
        return (
            np.array([0.0, 0.0]),
            np.array([1.0, self.y0 + self.amplitude]),
        )


class Torus(Shape):
    """Torus (3-D) around an axis parallel to z; exact signed distance."""

    kind = "torus"

    def __init__(self, center, major_radius: float, minor_radius: float):
        self.dim = 3
        self.center = _check_center(center, 3)
        if not 0 < minor_radius < major_radius:
            raise ValidationError(
                "torus needs 0 < minor_radius < major_radius, got "
                f"{minor_radius} and {major_radius}"
            )
        self.major_radius = float(major_radius)
        self.minor_radius = float(minor_radius)

    def values(self, x):
        pts, _ = _as_points(x, 3)
        d = pts - self.center
        ring = np.sqrt(d[:, 0] ** 2 + d[:, 1] ** 2) - self.major_radius
        return np.sqrt(ring**2 + d[:, 2] ** 2) - self.minor_radius

    def bounds(self):
        reach = np.array(
            [
                self.major_radius + self.minor_radius,
                self.major_radius + self.minor_radius,
                self.minor_radius,
            ]
        )
        return self.center - reach, self.center + reach


_SHAPE_BUILDERS = {
    "circle": (Circle, {"center", "radius", "dim"}),
    "square": (Square, {"center", "half_width", "dim"}),
    "diamond": (Diamond, {"center", "half_diag"}),
    "triangle": (Triangle, {"center", "radius", "rotation"}),
    "clover": (Clover, {"center", "mean_radius", "lobe"}),
    "sine_wall": (SineWall, {"y0", "amplitude", "frequency"}),
    "torus": (Torus, {"center", "major_radius", "minor_radius"}),
}


def make_shape(spec: dict) -> Shape:
    """Build a shape from a plain dict like ``{"kind": "circle", ...}``."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValidationError("shape spec must be a dict with a 'kind' key")
    kind = spec["kind"]
    if kind not in _SHAPE_BUILDERS:
        raise ValidationError(
            f"unknown shape kind {kind!r}; known kinds: {sorted(_SHAPE_BUILDERS)}"
        )
    cls, allowed = _SHAPE_BUILDERS[kind]
    kwargs = {k: v for k, v in spec.items() if k != "kind"}
    unknown = set(kwargs) - allowed
    if unknown:
        raise ValidationError(f"shape {kind!r} got unknown parameters {sorted(unknown)}")
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ValidationError(f"shape {kind!r}: {exc}") from exc


class World:
    """A validated scene of non-overlapping shapes in the unit box."""

    def __init__(self, shapes: list[Shape], dim: int, check_clearance: bool = True):
        if dim not in (2, 3):
            raise ValidationError(f"world dimension must be 2 or 3, got {dim}")
        for s in shapes:
            if s.dim != dim:
                raise ValidationError(
                    f"shape {s.kind!r} has dimension {s.dim}, world has {dim}"
                )
            s.check_placement()
        self.shapes = list(shapes)
        self.dim = int(dim)
        if check_clearance and len(shapes) > 1:
            self._check_pair_clearance()

    def _check_pair_clearance(self) -> None:
        # For exact distance fields, min over x of max(phi_i, phi_j) is half
        # the gap between shapes i and j; require at least CLEARANCE / 2.
        res = 256 if self.dim == 2 else 64
        grid = BoxGrid(res, self.dim)
        vals = np.stack([s.values(grid.centers) for s in self.shapes])
        for i in range(len(self.shapes)):
            for j in range(i + 1, len(self.shapes)):
                closest = np.min(np.maximum(vals[i], vals[j]))
                if closest < PAIR_CLEARANCE / 2.0:
                    raise ValidationError(
                        f"shapes {i} ({self.shapes[i].kind}) and {j} "
                        f"({self.shapes[j].kind}) are closer than {PAIR_CLEARANCE}"
                    )

    def values(self, x: NDArray) -> NDArray[np.float64]:
        """Per-shape boundary values, shape (n_shapes, N)."""
        pts, _ = _as_points(x, self.dim)
        if not self.shapes:
            return np.empty((0, pts.shape[0]))
        return np.stack([s.values(pts) for s in self.shapes])

    def min_value(self, x: NDArray) -> NDArray[np.float64]:
        """Pointwise minimum of the shape fields (positive = free space)."""
        pts, _ = _as_points(x, self.dim)
        if not self.shapes:
            return np.full(pts.shape[0], np.inf)
        return self.values(pts).min(axis=0)


def measure(x: NDArray, world: World) -> int:
    """Binary contact measurement: 1 if the point touches any shape
    (``phi <= 0`` for some shape), else 0."""
    if not world.shapes:
        return 0
    return int(world.min_value(np.asarray(x, dtype=float)[None, :])[0] <= 0.0)


def measure_batch(X: NDArray, world: World) -> NDArray[np.int_]:
    """Vectorized :func:`measure` over rows of ``X``."""
    pts, _ = _as_points(X, world.dim)
    return (world.min_value(pts) <= 0.0).astype(int)


def interior_mask(world: World, grid: BoxGrid) -> NDArray[np.bool_]:
    """Boolean occupancy of grid cells whose centers lie in any shape."""
    if grid.dim != world.dim:
        raise ValidationError(f"grid dim {grid.dim} != world dim {world.dim}")
    if not world.shapes:
        return np.zeros(grid.shape, dtype=bool)
    return grid.reshape(world.min_value(grid.centers) <= 0.0)
