"""Signed boundary function and world validation tests."""

import numpy as np
import pytest

from ergoshape.errors import ValidationError
from ergoshape.grid import BoxGrid
from ergoshape.shapes import (
    Circle,
    Clover,
    Diamond,
    SineWall,
    Square,
    Torus,
    Triangle,
    World,
    interior_mask,
    make_shape,
    measure,
    measure_batch,
)


def test_circle_values():
    c = Circle(center=[0.5, 0.5], radius=0.2)
    assert c.value(np.array([0.5, 0.5])) == pytest.approx(-0.2)
    assert c.value(np.array([0.9, 0.5])) == pytest.approx(0.2)
    assert c.value(np.array([0.7, 0.5])) == pytest.approx(0.0, abs=1e-15)


def test_square_values():
    s = Square(center=[0.5, 0.5], half_width=0.15)
    # corner-diagonal exterior point: distance to the corner
    assert s.value(np.array([0.75, 0.75])) == pytest.approx(0.1 * np.sqrt(2))
    assert s.value(np.array([0.5, 0.5])) == pytest.approx(-0.15)
    assert s.value(np.array([0.5, 0.62])) == pytest.approx(-0.03)
    assert s.value(np.array([0.9, 0.5])) == pytest.approx(0.25)


def test_diamond_vertices_on_boundary():
    d = Diamond(center=[0.5, 0.5], half_diag=0.18)
    for v in [(0.68, 0.5), (0.32, 0.5), (0.5, 0.68), (0.5, 0.32)]:
        assert d.value(np.array(v)) == pytest.approx(0.0, abs=1e-12)
    assert d.value(np.array([0.5, 0.5])) == pytest.approx(-0.18 / np.sqrt(2))


def test_triangle_vertices_and_center():
    t = Triangle(center=[0.5, 0.5], radius=0.2)
    for v in t.vertices:
        assert t.value(v) == pytest.approx(0.0, abs=1e-12)
    # center is inradius away from every edge (inradius = radius / 2)
    assert t.value(np.array([0.5, 0.5])) == pytest.approx(-0.1)


def test_clover_lobes():
    cl = Clover(center=[0.5, 0.5], mean_radius=0.15, lobe=0.07)
    # along +x (theta = 0) the boundary bulges to mean + lobe
    assert cl.value(np.array([0.5 + 0.22, 0.5])) == pytest.approx(0.0, abs=1e-12)
    # at 45 degrees the boundary shrinks to mean - lobe
    r = 0.15 - 0.07
    p = 0.5 + r * np.sqrt(0.5)
    assert cl.value(np.array([p, p])) == pytest.approx(0.0, abs=1e-12)


def test_sine_wall_curve():
    w = SineWall(y0=0.3, amplitude=0.12, frequency=2.5)
    xs = np.linspace(0, 1, 50)
    curve = 0.3 + 0.12 * np.sin(2 * np.pi * 2.5 * xs)
    on_curve = np.stack([xs, curve], axis=-1)
    assert np.allclose(w.values(on_curve), 0.0, atol=1e-12)
    assert w.value(np.array([0.0, 0.1])) < 0
    assert w.value(np.array([0.0, 0.9])) > 0


def test_torus_values():
    t = Torus(center=[0.5, 0.5, 0.5], major_radius=0.25, minor_radius=0.08)
    # hole center is major_radius - minor_radius outside
    assert t.value(np.array([0.5, 0.5, 0.5])) == pytest.approx(0.17)
    # tube center point
    assert t.value(np.array([0.75, 0.5, 0.5])) == pytest.approx(-0.08)
    # directly above the tube center circle
    assert t.value(np.array([0.75, 0.5, 0.58])) == pytest.approx(0.0, abs=1e-12)


def test_unit_gradient_for_distance_shapes():
    rng = np.random.default_rng(2)
    shapes = [
        Circle(center=[0.5, 0.5], radius=0.2),
        Square(center=[0.5, 0.5], half_width=0.15),
        Diamond(center=[0.5, 0.5], half_diag=0.18),
        Triangle(center=[0.5, 0.5], radius=0.2),
    ]
    for s in shapes:
        count = 0
        while count < 50:
            x = rng.uniform(0.05, 0.95, size=2)
            v = s.value(x)
            if abs(v) < 0.01:  # skip near-boundary points (kinks)
                continue
            g = s.gradient(x)
            # true distance fields have unit gradient away from kinks;
            # skip the medial axis where the FD straddles a kink
            norm = np.linalg.norm(g)
            if norm < 0.99:
                continue
            assert norm == pytest.approx(1.0, abs=1e-4)
            count += 1


def test_sign_consistency_random_points():
    rng = np.random.default_rng(9)
    c = Circle(center=[0.4, 0.6], radius=0.17)
    X = rng.uniform(0, 1, size=(10_000, 2))
    inside = np.linalg.norm(X - np.array([0.4, 0.6]), axis=-1) < 0.17
    vals = c.values(X)
    assert np.all(vals[inside] < 0)
    assert np.all(vals[~inside] >= 0)


def test_make_shape_dispatch_and_validation():
    s = make_shape({"kind": "circle", "center": [0.5, 0.5], "radius": 0.1})
    assert isinstance(s, Circle)
    with pytest.raises(ValidationError):
        make_shape({"kind": "blob", "center": [0.5, 0.5]})
    with pytest.raises(ValidationError):
        make_shape({"kind": "circle", "center": [0.5, 0.5], "radius": 0.1, "extra": 1})
    with pytest.raises(ValidationError):
        make_shape({"kind": "circle", "center": [0.5, 0.5], "radius": -0.1})
    with pytest.raises(ValidationError):
        make_shape({"kind": "circle", "center": [0.5, 0.5]})


def test_world_margin_enforced():
    with pytest.raises(ValidationError):
        World([Circle(center=[0.05, 0.5], radius=0.1)], dim=2)
    # exactly at the margin is allowed
    World([Circle(center=[0.5, 0.5], radius=0.48)], dim=2)


def test_world_clearance_enforced():
    a = Circle(center=[0.35, 0.5], radius=0.1)
    b = Circle(center=[0.555, 0.5], radius=0.1)  # gap 0.005 < 0.02
    with pytest.raises(ValidationError):
        World([a, b], dim=2)
    c = Circle(center=[0.65, 0.5], radius=0.1)  # gap 0.1
    World([a, c], dim=2)


def test_world_dim_mismatch():
    with pytest.raises(ValidationError):
        World([Circle(center=[0.5, 0.5], radius=0.1)], dim=3)


def test_sine_wall_margin_exemption():
    # interior reaches the bottom wall, but the curve stays inside: valid
    w = SineWall(y0=0.3, amplitude=0.12, frequency=2.5)
    World([w], dim=2)
    with pytest.raises(ValidationError):
        World([SineWall(y0=0.05, amplitude=0.12, frequency=1.0)], dim=2)


def test_measure_inclusive_boundary():
    world = World([Circle(center=[0.5, 0.5], radius=0.2)], dim=2)
    assert measure(np.array([0.7, 0.5]), world) == 1  # phi == 0 counts as contact
    assert measure(np.array([0.71, 0.5]), world) == 0
    assert measure(np.array([0.5, 0.5]), world) == 1


def test_measure_empty_world():
    world = World([], dim=2)
    assert measure(np.array([0.5, 0.5]), world) == 0


def test_measure_batch_matches_scalar():
    world = World(
        [
            Circle(center=[0.3, 0.3], radius=0.1),
            Square(center=[0.7, 0.7], half_width=0.1),
        ],
        dim=2,
    )
    rng = np.random.default_rng(4)
    X = rng.uniform(0, 1, size=(200, 2))
    batch = measure_batch(X, world)
    for i in range(X.shape[0]):
        assert batch[i] == measure(X[i], world)


def test_interior_mask_circle_area():
    world = World([Circle(center=[0.5, 0.5], radius=0.2)], dim=2)
    grid = BoxGrid(128, 2)
    mask = interior_mask(world, grid)
    area = mask.sum() * grid.cell_volume
    assert area == pytest.approx(np.pi * 0.04, rel=0.02)


def test_interior_mask_union():
    a = Circle(center=[0.3, 0.3], radius=0.1)
    b = Circle(center=[0.7, 0.7], radius=0.1)
    grid = BoxGrid(128, 2)
    both = interior_mask(World([a, b], dim=2), grid)
    only_a = interior_mask(World([a], dim=2), grid)
    only_b = interior_mask(World([b], dim=2), grid)
    assert np.array_equal(both, only_a | only_b)


def test_interior_mask_resolution_convergence():
    world = World([Circle(center=[0.5, 0.5], radius=0.2)], dim=2)
    true_area = np.pi * 0.04
    errs = []
    for res in (64, 128):
        mask = interior_mask(world, BoxGrid(res, 2))
        errs.append(abs(mask.sum() / res**2 - true_area))
    assert errs[1] < errs[0]


def test_bounds_reported():
    t = Torus(center=[0.5, 0.5, 0.5], major_radius=0.25, minor_radius=0.08)
    lo, hi = t.bounds()
    assert np.allclose(lo, [0.17, 0.17, 0.42])
    assert np.allclose(hi, [0.83, 0.83, 0.58])
