"""End-to-end experiments on known tables: rectangles, the right isoceles triangle and similar copies."""
import math
from fractions import Fraction

import numpy as np
import pytest

from polybilliards.commands.search import candidate_grid, search_leaders
from polybilliards.dynamics import (
    PhasePoint,
    billiard_step,
    billiard_step_back,
    find_generalized_diagonals,
    generate_orbit,
    leader,
)
from polybilliards.errors import DegeneratePolygon, OrbitTerminated
from polybilliards.geometry import make_polygon, rational_angle_analysis
from polybilliards.order import (
    FootprintSequence,
    same_combinatorial_order,
    same_combinatorial_order_exhaustive,
)
from polybilliards.scalars import EXACT, FLOAT
from polybilliards.surface import build_surface

from .conftest import RIGHT_ISOCELES

F = Fraction
SLOPE = 14142135 / 10000000


def test_square_and_rectangle_orbits_keep_the_same_order(float_square, float_rectangle):
    p = generate_orbit(float_square, leader(float_square, 0, 0.25, (1.0, SLOPE)), 10_000)
    q = generate_orbit(float_rectangle, leader(float_rectangle, 0, 0.5, (2.0, SLOPE)), 10_000)
    assert p.termination.completed and q.termination.completed
    a = FootprintSequence.from_record(p, float_square)
    b = FootprintSequence.from_record(q, float_rectangle)
    assert same_combinatorial_order(a, b, 10_000) is True


@pytest.mark.slow
def test_triangle_orbit_uses_exactly_2n_directions(right_isoceles):
    angles = rational_angle_analysis(right_isoceles)
    record = generate_orbit(right_isoceles, leader(right_isoceles, 0, F(1, 7), (1, 3)), 100_000)
    assert record.termination.completed
    assert len(record.directions_seen) == 2 * angles.N == 8
    by_side = record.directions_by_side()
    assert sorted(by_side) == [0, 1, 2]
    assert all(len(seen) == angles.N for seen in by_side.values())
    assert record.within_direction_bound(angles)


def test_surface_invariants(square, right_isoceles):
    torus = build_surface(square, rational_angle_analysis(square))
    assert torus.genus == 1
    assert len(torus.cone_points) == 4
    assert all(c.multiplicity == 1 for c in torus.cone_points)
    triangle = build_surface(right_isoceles, rational_angle_analysis(right_isoceles))
    assert triangle.genus == 1
    assert sorted({(c.corner, c.m, c.n) for c in triangle.cone_points}) == [(0, 1, 2), (1, 1, 4), (2, 1, 4)]


def test_exceptional_directions_of_the_square(square):
    assert find_generalized_diagonals(square, (1, 1), depth=2)[0].bounce_count == 1
    assert find_generalized_diagonals(square, (1, 2), depth=2)[0].bounce_count == 2


def test_step_back_undoes_step_on_random_phase_points(square):
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(1000):
        side = int(rng.integers(0, 4))
        t = F(int(rng.integers(1, 1009)), 1009)
        e = square.edges[side]
        normal = (-e[1], e[0])
        a, b = int(rng.integers(-5, 6)), int(rng.integers(1, 6))
        direction = (a * e[0] + b * normal[0], a * e[1] + b * normal[1])
        u = PhasePoint(square.point_on_side(side, t), direction)
        try:
            v = billiard_step(square, u)
        except OrbitTerminated:
            continue
        assert billiard_step_back(square, v) == u
        checked += 1
    assert checked > 900


def _random_polygon(rng, name):
    """Star-shaped polygon with half-integer vertices on a 16-slot angular grid."""

    while True:
        k = int(rng.integers(3, 9))
        slots = np.sort(rng.choice(16, size=k, replace=False))
        if np.diff(np.append(slots, slots[0] + 16)).max() >= 8:
            continue
        vertices = []
        for slot in slots:
            r = int(rng.integers(2, 7))
            angle = 2 * math.pi * int(slot) / 16
            vertices.append((F(round(2 * r * math.cos(angle)), 2), F(round(2 * r * math.sin(angle)), 2)))
        try:
            return make_polygon(vertices, EXACT, name)
        except DegeneratePolygon:
            continue


ROTATIONS = [(F(3, 5), F(4, 5)), (F(5, 13), F(12, 13)), (F(-8, 17), F(15, 17)), (F(1), F(0))]
SCALES = [F(3, 2), F(2, 5), F(7, 3), F(5, 4)]


@pytest.mark.parametrize(
    "trials, horizon",
    [(5, 150), pytest.param(20, 1000, marks=pytest.mark.slow)],
)
def test_similar_polygons_have_order_equivalent_orbits(trials, horizon):
    rng = np.random.default_rng(20240601)
    for trial in range(trials):
        p = _random_polygon(rng, f"random-{trial}")
        cos, sin = ROTATIONS[trial % len(ROTATIONS)]
        scale = SCALES[int(rng.integers(0, len(SCALES)))]
        shift = (F(int(rng.integers(-9, 10)), 3), F(int(rng.integers(-9, 10)), 7))

        def rotate(v):
            return (cos * v[0] - sin * v[1], sin * v[0] + cos * v[1])

        def similar(v):
            x, y = rotate(v)
            return (scale * x + shift[0], scale * y + shift[1])

        q = p.mapped(similar, f"similar-{trial}")
        for _ in range(20):
            side = int(rng.integers(0, p.size))
            t = F(int(rng.integers(1, 97)), 97)
            e = p.edges[side]
            a, b = int(rng.integers(-4, 5)), int(rng.integers(1, 5))
            d = (a * e[0] - b * e[1], a * e[1] + b * e[0])
            record_p = generate_orbit(p, PhasePoint(p.point_on_side(side, t), d), horizon)
            if record_p.termination.completed:
                break
        else:
            pytest.fail(f"no completed orbit found for trial {trial}")
        record_q = generate_orbit(q, PhasePoint(q.point_on_side(side, t), rotate(d)), horizon)
        assert record_q.termination == record_p.termination
        a_seq = FootprintSequence.from_record(record_p, p)
        b_seq = FootprintSequence.from_record(record_q, q)
        assert b_seq.perimeter != a_seq.perimeter
        assert same_combinatorial_order(a_seq, b_seq, horizon) is True


@pytest.mark.slow
def test_rank_comparator_agrees_with_exhaustive_check():
    rng = np.random.default_rng(11)
    disagreements = 0
    for _ in range(200):
        n = int(rng.integers(3, 51))
        spread = int(rng.integers(2, 2 * n))
        a = FootprintSequence(1, tuple(F(int(x), spread) for x in rng.integers(0, spread, n)))
        if rng.random() < 0.5:
            b = FootprintSequence(1, tuple((x * x + F(1, 3)) % 1 for x in a.points))
        else:
            b = FootprintSequence(1, tuple(F(int(x), spread) for x in rng.integers(0, spread, n)))
        fast = same_combinatorial_order(a, b, n)
        slow = same_combinatorial_order_exhaustive(a, b, n)
        disagreements += bool(fast) != bool(slow)
    assert disagreements == 0


@pytest.mark.slow
@pytest.mark.parametrize("count", [100, 1000])
def test_square_orbit_has_no_match_in_the_triangle(float_square, count):
    triangle = make_polygon(RIGHT_ISOCELES, FLOAT, "right-isoceles")
    u0 = leader(float_square, 0, 0.25, (1.0, SLOPE))
    candidates = candidate_grid(triangle, count, seed=3)
    results = search_leaders(float_square, u0, triangle, candidates, steps=1000, workers=1)
    assert len(results) == count
    assert all(r.horizon < 1001 for r in results)
