from fractions import Fraction

import pytest

from quadricgon.errors import CollidingSupportsError, HypothesisError, ParameterError, SearchCapError
from quadricgon.exactlinalg import Field
from quadricgon.horace import sample_g4_sets
from quadricgon.position import (
    check_e4_hypotheses,
    check_g4_hypotheses,
    max_on_curve_type,
    position_report,
)
from quadricgon.quadric import BiForm, make_point, random_point


def curve_x2y_minus_1(field):
    """s^2 u - t^2 v, i.e. X^2 Y = 1 in the affine chart."""
    coeffs = field.zeros(6)
    coeffs[2 * 2 + 1] = field(1)
    coeffs[0] = field(-1)
    return BiForm(2, 1, coeffs, field)


def test_few_points_lie_on_one_curve(field, rng):
    points = [random_point(field, rng) for _ in range(5)]
    best = max_on_curve_type(points, (2, 1), field)
    assert best.count == 5
    assert all(best.witness.contains(P) for P in points)
    assert max_on_curve_type(points[:3], (1, 1), field).count == 3


def test_general_points_report(field, rng):
    points = [random_point(field, rng) for _ in range(8)]
    report = position_report(points, field)
    assert report.max_on_line_first == report.max_on_line_second == 1
    assert report.max_on_11 == 3
    assert report.max_on_21 == report.max_on_12 == 5


def test_points_on_a_ruling_line(field):
    points = [make_point(field, 3, 1, y, 1) for y in range(4)] + [make_point(field, 5, 1, 0, 1)]
    best = max_on_curve_type(points, (1, 0), field)
    assert best.count == 4
    assert best.incident == (0, 1, 2, 3)
    assert max_on_curve_type(points, (0, 1), field).count == 2


def test_special_curve_is_found(field):
    f = curve_x2y_minus_1(field)
    points = [make_point(field, X, 1, field.inv(X * X), 1) for X in range(1, 7)]
    points += [make_point(field, 7, 1, 5, 1), make_point(field, 8, 1, 9, 1)]
    assert all(f.contains(P) for P in points[:6])
    best = max_on_curve_type(points, (2, 1), field)
    assert best.count == 6
    assert best.incident == (0, 1, 2, 3, 4, 5)
    assert best.witness.proportional(f)


@pytest.mark.parametrize("p", [None, 2**31 - 1])
def test_scalar_sweep(p):
    F = Field(p)
    on_curve = [make_point(F, X, 1, Fraction(1, X), 1) for X in (1, 2, 3, 4)]
    points = on_curve + [make_point(F, 5, 1, 7, 1), make_point(F, 6, 1, 2, 1)]
    best = max_on_curve_type(points, (1, 1), F)
    assert best.count == 4
    assert best.incident == (0, 1, 2, 3)
    xy_minus_1 = BiForm(1, 1, F.vector([-1, 0, 0, 1]), F)
    assert best.witness.proportional(xy_minus_1)


def test_monotone_in_the_point_set(field, rng):
    points = [random_point(field, rng) for _ in range(9)]
    counts = [max_on_curve_type(points[:n], (1, 1), field).count for n in range(4, 10)]
    assert counts == sorted(counts)


def test_search_cap(field):
    points = [make_point(field, i, 1, 2 * i + 1, 1) for i in range(65)]
    with pytest.raises(SearchCapError):
        max_on_curve_type(points, (1, 1), field, search_cap=64)
    # Lines are grouped directly, never capped
    assert max_on_curve_type(points, (1, 0), field, search_cap=64).count == 1


def test_bad_inputs(field, rng):
    P = random_point(field, rng)
    with pytest.raises(ParameterError, match="unsupported curve type"):
        max_on_curve_type([P], (2, 2), field)
    with pytest.raises(CollidingSupportsError):
        max_on_curve_type([P, P], (1, 1), field)


def test_e4_hypotheses(field, rng):
    assert check_e4_hypotheses([], 9, 9, field).passed
    P = random_point(field, rng)
    Q = make_point(field, P.first[0], 1, field.add(P.second[0], 1), 1)
    check = check_e4_hypotheses([P, Q], 9, 9, field)
    assert not check.passed
    assert any("(1, 0)" in v for v in check.violations)
    with pytest.raises(HypothesisError):
        check.require()
    with pytest.raises(ParameterError, match="out of lemma range"):
        check_e4_hypotheses([], 8, 9, field)


def test_g4_hypotheses(field, rng):
    assert check_g4_hypotheses([], [], 3, 2, field).passed
    with pytest.raises(ParameterError, match="out of lemma range"):
        check_g4_hypotheses([], [], 2, 2, field)
    S, B = sample_g4_sets(9, 30, 3, 2, field, rng)
    assert check_g4_hypotheses(S, B, 3, 2, field).passed
    extra = random_point(field, rng)
    check = check_g4_hypotheses(S, B + [extra], 3, 2, field)
    assert any("10*alpha" in v for v in check.violations)
