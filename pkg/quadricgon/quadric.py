"""
quadric.py - Geometry of Q = P^1 x P^1 in coordinates.

Conventions used throughout the package:
- A form of bidegree (a, b) is a combination of the monomials
  s^i t^(a-i) u^j v^(b-j); coefficient vectors are ordered i-major, j-minor,
  both ascending, so monomial (i, j) sits at index i*(b+1) + j.
- Curves of type (1,0) are {point} x P^1: the first coordinate [s:t] is fixed.
  Curves of type (0,1) fix the second coordinate [u:v].
- Points are stored chart-normalised: each factor is [x:1], or [1:0] at infinity.
  Derivative conditions are taken in that affine chart.

Provides the point, scheme and form types, `condition_rows()` (the matrix whose
kernel is the linear system through a scheme) and `BinaryForm`, the restriction
of a form to a ruling line, with its root bookkeeping.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sympy import Poly, Rational, Symbol
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import (
    gf_degree,
    gf_diff,
    gf_factor_sqf,
    gf_gcd,
    gf_pow_mod,
    gf_sqf_part,
    gf_strip,
    gf_sub,
)

from .errors import CollidingSupportsError, EmptySystemError, ParameterError
from .exactlinalg import Field, solve

logger = logging.getLogger(__name__)

FIRST = "first"
SECOND = "second"
LINE_TYPES = ((1, 0), (0, 1))


@dataclass(frozen=True)
class Bidegree:
    a: int
    b: int

    @property
    def dim(self):
        """(a+1)(b+1), the dimension of the space of forms."""
        if self.a < 0 or self.b < 0:
            return 0
        return (self.a + 1) * (self.b + 1)

    def twist(self, da, db):
        return Bidegree(self.a + da, self.b + db)


def as_bidegree(d):
    if isinstance(d, Bidegree):
        return d
    a, b = d
    return Bidegree(int(a), int(b))


def monomial_basis(d):
    """Exponent pairs (i, j) of s^i t^(a-i) u^j v^(b-j) in coefficient order."""
    d = as_bidegree(d)
    if d.a < 0 or d.b < 0:
        raise EmptySystemError(f"empty system: bidegree ({d.a},{d.b}) has no sections")
    return [(i, j) for i in range(d.a + 1) for j in range(d.b + 1)]


# --- points ------------------------------------------------------------------


def _normalize_pair(field, x0, x1):
    x0, x1 = field(x0), field(x1)
    if x1 != 0:
        return (field.div(x0, x1), field(1))
    if x0 == 0:
        raise ParameterError("projective pair [0:0] is not a point")
    return (field(1), field(0))


@dataclass(frozen=True)
class QuadricPoint:
    """A point ([s:t], [u:v]) of Q, chart-normalised (see `make_point`)."""

    first: tuple
    second: tuple

    def to_json(self, field):
        return [[field.to_str(c) for c in self.first], [field.to_str(c) for c in self.second]]


def make_point(field, s, t, u, v):
    """Build a point from arbitrary projective coordinates."""
    return QuadricPoint(_normalize_pair(field, s, t), _normalize_pair(field, u, v))


def point_from_json(data, field):
    (s, t), (u, v) = data
    return make_point(field, s, t, u, v)


def random_point(field, rng):
    # Affine chart points; infinity is a closed condition general points avoid
    return make_point(field, field.random_element(rng), 1, field.random_element(rng), 1)


def _chart_powers(pair, degree, field):
    """Monomials x0^i x1^(degree-i) and their first/second chart derivatives."""
    x0, x1 = pair
    if x1 != 0:
        coord, exponents = x0, range(degree + 1)
    else:
        # Point [1:0]: the chart coordinate is x1/x0, which vanishes there
        coord, exponents = x1, [degree - i for i in range(degree + 1)]
    values, d1, d2 = [], [], []
    for e in exponents:
        values.append(field.power(coord, e))
        d1.append(field.mul(e, field.power(coord, e - 1)) if e >= 1 else field(0))
        d2.append(field.mul(e * (e - 1), field.power(coord, e - 2)) if e >= 2 else field(0))
    return field.vector(values), field.vector(d1), field.vector(d2)


def point_jet(point, d, field):
    """Rows evaluating a form of bidegree d and its chart derivatives at point."""
    d = as_bidegree(d)
    F, Fx, Fxx = _chart_powers(point.first, d.a, field)
    G, Gy, Gyy = _chart_powers(point.second, d.b, field)

    def outer(left, right):
        return field.reduce(np.outer(left, right)).ravel()

    return {
        "f": outer(F, G),
        "x": outer(Fx, G),
        "y": outer(F, Gy),
        "xx": outer(Fxx, G),
        "xy": outer(Fx, Gy),
        "yy": outer(F, Gyy),
    }


# --- point schemes -----------------------------------------------------------


@dataclass(frozen=True)
class Reduced:
    point: QuadricPoint
    degree = 1


@dataclass(frozen=True)
class Fat:
    """First infinitesimal neighbourhood 2P: value and both derivatives vanish."""

    point: QuadricPoint
    degree = 3


@dataclass(frozen=True)
class RulingTangent:
    """
    Degree-2 scheme at P inside a ruling line. ruling="first" differentiates along
    the first factor (the scheme lies in the (0,1)-line through P); "second"
    differentiates along the second factor (it lies in the (1,0)-line).
    """

    point: QuadricPoint
    ruling: str
    degree = 2

    def __post_init__(self):
        if self.ruling not in (FIRST, SECOND):
            raise ParameterError(f"ruling must be '{FIRST}' or '{SECOND}'")


@dataclass(frozen=True)
class PointScheme:
    items: tuple = ()

    @classmethod
    def reduced(cls, points):
        return cls(tuple(Reduced(p) for p in points))

    @classmethod
    def fat(cls, points):
        return cls(tuple(Fat(p) for p in points))

    def __add__(self, other):
        return PointScheme(self.items + tuple(other.items))

    @property
    def degree(self):
        return sum(item.degree for item in self.items)

    @property
    def supports(self):
        return [item.point for item in self.items]

    def __len__(self):
        return len(self.items)


def condition_rows(scheme, d, field):
    """
    Matrix with deg(scheme) rows and (a+1)(b+1) columns: a form f vanishes on the
    scheme iff rows . coeffs(f) = 0.
    """
    d = as_bidegree(d)
    if d.a < 0 or d.b < 0:
        raise ParameterError("nonnegative bidegree required")
    supports = scheme.supports
    if len(set(supports)) != len(supports):
        raise CollidingSupportsError()
    rows = []
    for item in scheme.items:
        jet = point_jet(item.point, d, field)
        rows.append(jet["f"])
        if isinstance(item, Fat):
            rows.extend([jet["x"], jet["y"]])
        elif isinstance(item, RulingTangent):
            rows.append(jet["x"] if item.ruling == FIRST else jet["y"])
    if not rows:
        return field.zeros((0, d.dim))
    return np.vstack(rows)


# --- bihomogeneous forms -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class BiForm:
    a: int
    b: int
    coeffs: np.ndarray
    field: Field

    @property
    def bidegree(self):
        return Bidegree(self.a, self.b)

    def grid(self):
        return np.asarray(self.coeffs).reshape(self.a + 1, self.b + 1)

    def coefficient(self, i, j):
        return self.coeffs[i * (self.b + 1) + j]

    def is_zero(self):
        return not np.any(self.coeffs != 0)

    def __eq__(self, other):
        if not isinstance(other, BiForm):
            return NotImplemented
        return (self.a, self.b) == (other.a, other.b) and not np.any(self.coeffs != other.coeffs)

    __hash__ = None

    def proportional(self, other):
        """Same curve: equal up to a nonzero scalar."""
        if (self.a, self.b) != (other.a, other.b):
            return False
        nz = np.flatnonzero(self.coeffs != 0)
        if nz.size == 0:
            return other.is_zero()
        k = int(nz[0])
        if other.coeffs[k] == 0:
            return False
        scale = self.field.div(other.coeffs[k], self.coeffs[k])
        return not np.any(self.field.reduce(self.coeffs * scale) != other.coeffs)

    def evaluate(self, point):
        return self.field.reduce(point_jet(point, self.bidegree, self.field)["f"] @ self.coeffs)

    def contains(self, point):
        return self.evaluate(point) == 0

    def chart_jet(self, point):
        """Value, gradient and Hessian entries of f in the chart of point."""
        jet = point_jet(point, self.bidegree, self.field)
        return {k: self.field.reduce(row @ self.coeffs) for k, row in jet.items()}

    def partial(self, var):
        """Homogeneous partial derivative with respect to s, t, u or v."""
        field = self.field
        g = self.grid()
        a, b = self.a, self.b
        if var in ("s", "t"):
            if a == 0:
                return zero_form(0, b, field)
            out = field.zeros((a, b + 1))
            for i in range(a + 1):
                e = i if var == "s" else a - i
                if e:
                    out[i - 1 if var == "s" else i] = field.reduce(g[i] * e)
            return BiForm(a - 1, b, out.ravel(), field)
        if var in ("u", "v"):
            return self.swap().partial("s" if var == "u" else "t").swap()
        raise ParameterError(f"unknown variable {var!r}")

    def swap(self):
        """Exchange the two factors: (a,b) -> (b,a)."""
        return BiForm(self.b, self.a, self.grid().T.copy().ravel(), self.field)

    def multiply(self, other):
        field = self.field
        out = field.zeros((self.a + other.a + 1, self.b + other.b + 1))
        mine = self.grid()
        for (i, j), c in np.ndenumerate(other.grid()):
            if c != 0:
                block = out[i:i + self.a + 1, j:j + self.b + 1]
                out[i:i + self.a + 1, j:j + self.b + 1] = field.reduce(block + mine * c)
        return BiForm(self.a + other.a, self.b + other.b, out.ravel(), field)

    def divide_exact(self, divisor):
        """Quotient q with divisor * q == self, or None if divisor does not divide."""
        qa, qb = self.a - divisor.a, self.b - divisor.b
        if qa < 0 or qb < 0:
            return None
        field = self.field
        columns = []
        for k in range((qa + 1) * (qb + 1)):
            unit = field.zeros((qa + 1) * (qb + 1))
            unit[k] = field(1)
            columns.append(divisor.multiply(BiForm(qa, qb, unit, field)).coeffs)
        q = solve(np.column_stack(columns), self.coeffs, field)
        if q is None:
            return None
        return BiForm(qa, qb, q, field)

    def restrict(self, line):
        """Restriction to a ruling line, as a binary form (see `restrict_to_ruling`)."""
        return restrict_to_ruling(self, line)

    def to_json(self):
        return {
            "a": self.a,
            "b": self.b,
            "p": self.field.p,
            "coeffs": [self.field.to_str(c) for c in self.coeffs],
        }


def zero_form(a, b, field):
    return BiForm(a, b, field.zeros((a + 1) * (b + 1)), field)


def biform_from_json(data, field=None):
    if field is None:
        field = Field(data.get("p"))
    coeffs = field.vector(data["coeffs"])
    a, b = int(data["a"]), int(data["b"])
    if len(coeffs) != (a + 1) * (b + 1):
        raise ParameterError("coefficient count does not match bidegree")
    return BiForm(a, b, coeffs, field)


# --- ruling lines and binary forms -------------------------------------------


@dataclass(frozen=True)
class RulingLine:
    """Line of type (1,0) (first coordinate fixed at coord) or (0,1) (second fixed)."""

    kind: tuple
    coord: tuple

    def contains(self, point):
        return (point.first if self.kind == (1, 0) else point.second) == self.coord

    def as_biform(self, field):
        x0, x1 = self.coord
        coeffs = field.vector([field.neg(x0), x1])
        if self.kind == (1, 0):
            return BiForm(1, 0, coeffs, field)
        return BiForm(0, 1, coeffs, field)


def line_through(point, kind):
    kind = tuple(kind)
    if kind not in LINE_TYPES:
        raise ParameterError(f"ruling lines have type (1,0) or (0,1), not {kind}")
    return RulingLine(kind, point.first if kind == (1, 0) else point.second)


def restrict_to_ruling(f, line):
    """
    Binary form obtained by fixing the ruling coordinate: degree b in (u,v) on a
    (1,0)-line, degree a in (s,t) on a (0,1)-line. Zero iff the line divides f.
    """
    field = f.field
    grid = f.grid() if line.kind == (1, 0) else f.grid().T
    degree = grid.shape[1] - 1
    weights, _, _ = _chart_powers(line.coord, grid.shape[0] - 1, field)
    coeffs = field.reduce(weights @ grid)
    return BinaryForm(degree, tuple(coeffs), field)


_X = Symbol("X")


def _uni(field, coeffs_low_high):
    """Dehomogenised polynomial in the backend of the field (high-to-low order)."""
    high_low = list(reversed(coeffs_low_high))
    if field.p is None:
        return Poly([Rational(Fraction(c).numerator, Fraction(c).denominator) for c in high_low], _X, domain="QQ")
    return gf_strip([int(c) % field.p for c in high_low])


def _uni_degree(field, f):
    if field.p is None:
        return -1 if f.is_zero else int(f.degree())
    return gf_degree(f)


def _uni_gcd(field, f, g):
    if field.p is None:
        return f.gcd(g)
    return gf_gcd(f, g, field.p, ZZ)


def _uni_diff(field, f):
    if field.p is None:
        return f.diff(_X)
    return gf_diff(f, field.p, ZZ)


def _uni_sqf(field, f):
    if field.p is None:
        return f.sqf_part()
    return gf_sqf_part(f, field.p, ZZ)


def _uni_roots(field, f):
    """Distinct roots of f lying in the field itself."""
    if _uni_degree(field, f) <= 0:
        return []
    if field.p is None:
        return sorted(Fraction(int(r.p), int(r.q)) for r in f.ground_roots())
    p = field.p
    f = gf_sqf_part(f, p, ZZ)
    # Split off the product of linear factors: gcd(f, X^p - X)
    frob = gf_sub(gf_pow_mod([1, 0], p, f, p, ZZ), [1, 0], p, ZZ)
    linear = gf_gcd(f, frob, p, ZZ)
    if gf_degree(linear) <= 0:
        return []
    _, factors = gf_factor_sqf(linear, p, ZZ)
    return sorted((-int(fac[-1])) % p for fac in factors)


@dataclass(frozen=True, eq=False)
class BinaryForm:
    """sum_j coeffs[j] x^j y^(degree-j); roots are points [x:y] of P^1."""

    degree: int
    coeffs: tuple
    field: Field

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def evaluate(self, pair):
        x, y = pair
        field = self.field
        total = field(0)
        for j, c in enumerate(self.coeffs):
            term = field.mul(c, field.mul(field.power(x, j), field.power(y, self.degree - j)))
            total = field.add(total, term)
        return total

    def _poly(self):
        return _uni(self.field, self.coeffs)

    def infinity_multiplicity(self):
        """Multiplicity of the root [1:0]."""
        return self.degree - _uni_degree(self.field, self._poly())

    def distinct_roots(self):
        """Number of distinct roots over the algebraic closure (None for the zero form)."""
        if self.is_zero():
            return None
        field = self.field
        poly = self._poly()
        finite = _uni_degree(field, _uni_sqf(field, poly)) if _uni_degree(field, poly) > 0 else 0
        return finite + (1 if self.infinity_multiplicity() > 0 else 0)

    def repeated_degree(self):
        """Degree of gcd(F, F') in the homogeneous sense: sum of (multiplicity - 1)."""
        if self.is_zero():
            return None
        field = self.field
        poly = self._poly()
        finite = 0
        if _uni_degree(field, poly) > 0:
            finite = max(_uni_degree(field, _uni_gcd(field, poly, _uni_diff(field, poly))), 0)
        return finite + max(self.infinity_multiplicity() - 1, 0)

    def field_roots(self):
        """Roots defined over the field, as normalised pairs [x:1] or [1:0]."""
        field = self.field
        roots = [(field(r), field(1)) for r in _uni_roots(field, self._poly())]
        if self.infinity_multiplicity() > 0:
            roots.append((field(1), field(0)))
        return roots


def common_root_count(forms):
    """
    Distinct common roots over the algebraic closure of several binary forms.
    Zero forms impose nothing; returns None when every form is zero.
    """
    nonzero = [f for f in forms if not f.is_zero()]
    if not nonzero:
        return None
    field = nonzero[0].field
    g = nonzero[0]._poly()
    for f in nonzero[1:]:
        g = _uni_gcd(field, g, f._poly())
    finite = _uni_degree(field, _uni_sqf(field, g)) if _uni_degree(field, g) > 0 else 0
    at_infinity = min(f.infinity_multiplicity() for f in nonzero) > 0
    return finite + (1 if at_infinity else 0)
