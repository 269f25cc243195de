from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from polybilliards.dynamics import generate_orbit, leader
from polybilliards.errors import DuplicateAmbiguity, LowCoverage, OrderMismatch
from polybilliards.order import (
    FootprintSequence,
    agreement_horizon,
    build_correspondence,
    check_quasisimilarity,
    in_arc,
    same_combinatorial_order,
    same_combinatorial_order_exhaustive,
)

F = Fraction


def seq(*values, perimeter=1, tolerance=0.0):
    return FootprintSequence(perimeter, tuple(values), tolerance=tolerance)


def test_in_arc_examples():
    assert in_arc(0.5, 0.2, 0.7, 1)
    assert in_arc(0.05, 0.9, 0.2, 1)
    assert not in_arc(0.3, 0.2, 0.2, 1)
    assert in_arc(0.2, 0.2, 0.2, 1)
    assert in_arc(0.7, 0.2, 0.7, 1)


@given(
    st.fractions(min_value=0, max_value=1).filter(lambda x: x < 1),
    st.fractions(min_value=0, max_value=1).filter(lambda x: x < 1),
    st.fractions(min_value=0, max_value=1).filter(lambda x: x < 1),
)
def test_in_arc_splits_the_circle(x, a, b):
    if a == b or x in (a, b):
        return
    assert in_arc(x, a, b, 1) != in_arc(x, b, a, 1)


def test_same_order_examples():
    a = seq(0.1, 0.5, 0.9, 0.3)
    assert same_combinatorial_order(a, seq(0.2, 0.6, 0.95, 0.4), 4) is True
    witness = same_combinatorial_order(a, seq(0.2, 0.6, 0.4, 0.95), 4)
    assert not witness
    assert witness.in_p != witness.in_q
    assert same_combinatorial_order(a, a, 4) is True


def test_rotation_of_the_circle_keeps_order():
    a = seq(*(F(k, 7) for k in (3, 1, 6, 0, 4)))
    b = seq(*((x + F(1, 2)) % 1 for x in a.points))
    assert same_combinatorial_order(a, b, 5) is True


def test_duplicate_pattern_mismatch_gives_witness():
    witness = same_combinatorial_order(seq(F(1, 4), F(1, 2), F(1, 4)), seq(F(1, 4), F(1, 2), F(3, 4)), 3)
    assert witness.triple == (2, 0, 0)
    assert witness.in_p and not witness.in_q


def test_float_duplicate_ambiguity():
    with pytest.raises(DuplicateAmbiguity):
        same_combinatorial_order(seq(0.1, 0.1, 0.5, tolerance=1e-9), seq(0.2, 0.3, 0.6, tolerance=1e-9), 3)


def test_horizon_preconditions():
    with pytest.raises(ValueError):
        same_combinatorial_order(seq(0.1, 0.2), seq(0.1, 0.2), 2)
    with pytest.raises(ValueError):
        same_combinatorial_order(seq(0.1, 0.2, 0.3), seq(0.1, 0.2, 0.3), 4)


points = st.lists(st.integers(min_value=0, max_value=15), min_size=3, max_size=12)


@settings(max_examples=100, deadline=None)
@given(points, points)
def test_fast_path_matches_exhaustive_check(xs, ys):
    n = min(len(xs), len(ys))
    a = seq(*(F(x, 16) for x in xs[:n]))
    b = seq(*(F(y, 16) for y in ys[:n]))
    fast = same_combinatorial_order(a, b, n)
    assert bool(fast) == bool(same_combinatorial_order_exhaustive(a, b, n))
    if not fast:
        assert fast.in_p != fast.in_q


@settings(max_examples=100, deadline=None)
@given(points, st.integers(min_value=0, max_value=15), st.integers(min_value=1, max_value=3))
def test_monotone_circle_maps_preserve_order(xs, shift, power):
    a = seq(*(F(x, 16) for x in xs))
    b = seq(*(((F(x, 16) ** power) + F(shift, 16)) % 1 for x in xs))
    assert same_combinatorial_order(a, b, len(xs)) is True
    assert same_combinatorial_order(b, a, len(xs)) is True


@given(points, points)
def test_comparator_is_symmetric(xs, ys):
    n = min(len(xs), len(ys))
    a = seq(*(F(x, 16) for x in xs[:n]))
    b = seq(*(F(y, 16) for y in ys[:n]))
    assert bool(same_combinatorial_order(a, b, n)) == bool(same_combinatorial_order(b, a, n))


def test_agreement_horizon_finds_first_break():
    a = seq(0.1, 0.5, 0.9, 0.3, 0.7)
    b = seq(0.1, 0.5, 0.9, 0.3, 0.2)
    assert agreement_horizon(a, b) == 4
    assert agreement_horizon(a, a) == 5


def test_correspondence_interpolates():
    corr = build_correspondence(seq(F(0), F(1, 4), F(1, 2)), seq(F(1, 10), F(7, 20), F(3, 5)))
    assert corr(0) == F(1, 10)
    assert corr(F(1, 4)) == F(7, 20)
    assert corr(F(1, 2)) == F(3, 5)
    assert corr(F(1, 8)) == F(9, 40)
    assert corr(F(3, 4)) == F(17, 20)


def test_correspondence_rejects_mismatch():
    with pytest.raises(OrderMismatch) as info:
        build_correspondence(seq(0.1, 0.5, 0.9, 0.3), seq(0.2, 0.6, 0.4, 0.95))
    assert info.value.witness.in_p != info.value.witness.in_q


def test_correspondence_of_rotated_square_orbit(square):
    p = generate_orbit(square, leader(square, 0, F(1, 3), (1, 2)), 40)
    q = generate_orbit(square, leader(square, 1, F(1, 3), (-2, 1)), 40)
    a = FootprintSequence.from_record(p, square)
    b = FootprintSequence.from_record(q, square)
    assert all(y == (x + 1) % 4 for x, y in zip(a.points, b.points))
    corr = build_correspondence(a, b)
    assert all(corr(x) == (x + 1) % 4 for x in a.points)


def test_correspondence_is_monotone(float_square):
    u = leader(float_square, 0, 0.25, (1.0, 1.4142135))
    a = FootprintSequence.from_record(generate_orbit(float_square, u, 300), float_square)
    corr = build_correspondence(a, a)
    for s, t, r in ((0.3, 1.7, 3.2), (3.5, 0.4, 1.1)):
        assert in_arc(corr(t), corr(s), corr(r), 4) == in_arc(t, s, r, 4)


def test_quasisimilarity_square_against_rectangle(float_square, float_rectangle):
    p = generate_orbit(float_square, leader(float_square, 0, 0.25, (1.0, 1.4142135)), 4000)
    q = generate_orbit(float_rectangle, leader(float_rectangle, 0, 0.5, (2.0, 1.4142135)), 4000)
    corr = build_correspondence(
        FootprintSequence.from_record(p, float_square), FootprintSequence.from_record(q, float_rectangle)
    )
    report = check_quasisimilarity(corr, float_square, float_rectangle, tol=0.05)
    assert report.corners_preserved
    assert [c.nearest for c in report.corners] == [0, 1, 2, 3]
    assert all(c.distance < 0.05 for c in report.corners)
    assert all(c.angle_difference == pytest.approx(0) for c in report.corners)
    assert sorted(round(r, 6) for _, _, r in report.side_ratios) == [1.0, 1.0, 2.0, 2.0]
    assert not report.similar
    assert report.affinely_similar


def test_quasisimilarity_identity(float_square):
    record = generate_orbit(float_square, leader(float_square, 0, 0.25, (1.0, 1.4142135)), 2000)
    a = FootprintSequence.from_record(record, float_square)
    report = check_quasisimilarity(build_correspondence(a, a), float_square, float_square, tol=0.05)
    assert all(c.distance == pytest.approx(0, abs=1e-12) for c in report.corners)
    assert all(r == pytest.approx(1) for _, _, r in report.side_ratios)
    assert report.similar


def test_sparse_orbits_have_low_coverage(square):
    record = generate_orbit(square, leader(square, 0, F(1, 3), (1, 2)), 9)
    a = FootprintSequence.from_record(record, square)
    with pytest.raises(LowCoverage):
        check_quasisimilarity(build_correspondence(a, a), square, square, tol=0.05)
