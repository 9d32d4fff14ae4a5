from fractions import Fraction

import numpy as np
import pytest

from quadricgon.errors import CollidingSupportsError, EmptySystemError, ParameterError
from quadricgon.exactlinalg import Field, kernel_basis, rank
from quadricgon.quadric import (
    BiForm,
    BinaryForm,
    Fat,
    PointScheme,
    RulingLine,
    RulingTangent,
    common_root_count,
    condition_rows,
    line_through,
    make_point,
    monomial_basis,
    point_from_json,
    random_point,
    restrict_to_ruling,
)


def form(field, a, b, entries):
    """Form of bidegree (a, b) from {(i, j): coefficient}."""
    coeffs = field.zeros((a + 1) * (b + 1))
    for (i, j), c in entries.items():
        coeffs[i * (b + 1) + j] = field(c)
    return BiForm(a, b, coeffs, field)


@pytest.mark.parametrize("d, count", [((0, 0), 1), ((1, 1), 4), ((2, 1), 6), ((4, 5), 30)])
def test_monomial_basis_size(d, count):
    assert len(monomial_basis(d)) == count


def test_monomial_basis_negative_is_empty():
    with pytest.raises(EmptySystemError, match="empty system"):
        monomial_basis((-1, 2))


def test_points_are_chart_normalised(field):
    P = make_point(field, 2, 4, 3, 0)
    assert P.first == (field("1/2"), 1)
    assert P.second == (1, 0)
    assert make_point(field, 2, 3, 5, 7) == make_point(field, 4, 6, 10, 14)
    assert point_from_json(P.to_json(field), field) == P


def test_zero_pair_is_rejected(field):
    with pytest.raises(ParameterError):
        make_point(field, 0, 0, 1, 1)


def test_condition_rows_shapes(field, rng):
    P, Q = random_point(field, rng), random_point(field, rng)
    scheme = PointScheme.fat([P]) + PointScheme.reduced([Q])
    assert scheme.degree == 4
    assert condition_rows(scheme, (3, 2), field).shape == (4, 12)
    assert condition_rows(PointScheme(), (3, 3), field).shape == (0, 16)


def test_colliding_supports(field, rng):
    P = random_point(field, rng)
    with pytest.raises(CollidingSupportsError):
        condition_rows(PointScheme.fat([P]) + PointScheme.reduced([P]), (2, 2), field)


def test_negative_bidegree_rows(field):
    with pytest.raises(ParameterError, match="nonnegative bidegree required"):
        condition_rows(PointScheme(), (-1, 0), field)


@pytest.mark.parametrize("p", [65537, None])
def test_fat_point_is_both_ruling_tangents(p, rng):
    F = Field(p)
    P = make_point(F, 2, 1, 3, 1)
    fat = condition_rows(PointScheme((Fat(P),)), (2, 2), F)
    first = condition_rows(PointScheme((RulingTangent(P, "first"),)), (2, 2), F)
    second = condition_rows(PointScheme((RulingTangent(P, "second"),)), (2, 2), F)
    assert rank(fat, F) == 3
    assert rank(first, F) == rank(second, F) == 2
    assert rank(np.vstack([first, second]), F) == 3
    assert rank(np.vstack([fat, first, second]), F) == 3
    for v in kernel_basis(fat, F):
        assert not np.any(F.dot(first, v) != 0)


def test_ruling_tangent_validates_ruling(field, rng):
    with pytest.raises(ParameterError):
        RulingTangent(random_point(field, rng), "diagonal")


def test_partials(field):
    f = form(field, 2, 1, {(2, 1): 1})  # s^2 u
    ds = f.partial("s")
    assert (ds.a, ds.b) == (1, 1)
    assert ds.coefficient(1, 1) == 2
    du = f.partial("u")
    assert (du.a, du.b) == (2, 0)
    assert du.coefficient(2, 0) == 1
    assert f.partial("t").is_zero()
    assert f.partial("v").is_zero()


def test_swap_transposes(field):
    f = form(field, 2, 1, {(2, 1): 1, (0, 0): 5})
    g = f.swap()
    assert (g.a, g.b) == (1, 2)
    assert g.coefficient(1, 2) == 1
    assert g.coefficient(0, 0) == 5
    assert g.swap() == f


def test_multiply_then_divide(field, rng):
    f = BiForm(2, 3, field.vector([field.random_element(rng) for _ in range(12)]), field)
    g = BiForm(1, 1, field.vector([1, 2, 3, 4]), field)
    h = f.multiply(g)
    assert (h.a, h.b) == (3, 4)
    assert h.divide_exact(g) == f
    assert h.divide_exact(BiForm(0, 5, field.vector([1] * 6), field)) is None


def test_evaluate_and_restrict_agree(field, rng):
    f = BiForm(4, 4, field.vector([field.random_element(rng) for _ in range(25)]), field)
    c = random_point(field, rng)
    line = line_through(c, (1, 0))
    restricted = restrict_to_ruling(f, line)
    assert restricted.degree == 4
    for y in range(5):
        P = make_point(field, c.first[0], c.first[1], y, 1)
        assert restricted.evaluate((y, 1)) == f.evaluate(P)


def test_line_divides_form_iff_restriction_vanishes(field, rng):
    c = random_point(field, rng)
    line = line_through(c, (1, 0))
    h = BiForm(3, 4, field.vector([field.random_element(rng) for _ in range(20)]), field)
    f = line.as_biform(field).multiply(h)
    assert restrict_to_ruling(f, line).is_zero()
    assert f.contains(c)
    assert line.contains(c)


def test_restriction_of_product_of_lines(field):
    lines = [RulingLine((0, 1), (k, 1)).as_biform(field) for k in (1, 2, 3)]
    f = lines[0].multiply(lines[1]).multiply(lines[2])
    restricted = f.restrict(RulingLine((1, 0), (5, 1)))
    assert restricted.distinct_roots() == 3
    assert restricted.repeated_degree() == 0
    assert restricted.field_roots() == [(1, 1), (2, 1), (3, 1)]


@pytest.mark.parametrize("p", [65537, None])
def test_binary_form_multiplicities(p):
    F = Field(p)
    # (x - y)^2 (x + y) = y^3 - x y^2 - x^2 y + x^3
    g = BinaryForm(3, (F(1), F(-1), F(-1), F(1)), F)
    assert g.distinct_roots() == 2
    assert g.repeated_degree() == 1
    # x y^2: a simple root at 0 and a double root at infinity
    h = BinaryForm(3, (F(0), F(1), F(0), F(0)), F)
    assert h.infinity_multiplicity() == 2
    assert h.distinct_roots() == 2
    assert h.repeated_degree() == 1
    assert h.field_roots() == [(0, 1), (1, 0)]


def test_binary_form_roots_outside_the_field():
    F = Field(None)
    g = BinaryForm(2, (F(-2), F(0), F(1)), F)  # x^2 - 2 y^2
    assert g.distinct_roots() == 2
    assert g.field_roots() == []
    assert BinaryForm(2, (Fraction(-1, 4), 0, 1), F).field_roots() == [(Fraction(-1, 2), 1), (Fraction(1, 2), 1)]


def test_common_root_count(field):
    # (x - y)(x - 2y) and (x - y)(x - 3y)
    f = BinaryForm(2, (2, field(-3), 1), field)
    g = BinaryForm(2, (3, field(-4), 1), field)
    assert common_root_count([f, g]) == 1
    zero = BinaryForm(2, (0, 0, 0), field)
    assert common_root_count([f, zero]) == 2
    assert common_root_count([zero, zero]) is None
