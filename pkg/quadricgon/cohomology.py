"""
cohomology.py - h^0 and h^1 of ideal sheaves of point schemes on Q.

Since h^1(O_Q(a,b)) = 0 for a, b >= 0, both numbers come from one rank:
- h0 = (a+1)(b+1) - rank(condition_rows)
- h1 = deg(scheme) - rank(condition_rows)
"""

import logging
from dataclasses import dataclass

from .errors import EmptySystemError, ParameterError
from .exactlinalg import kernel_basis, rank
from .quadric import BiForm, as_bidegree, condition_rows

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CohomologyReport:
    a: int
    b: int
    h0: int
    h1: int
    degree: int
    rank: int

    @property
    def expected_h0(self):
        return max(0, (self.a + 1) * (self.b + 1) - self.degree)

    def to_json(self):
        return {"h0": self.h0, "h1": self.h1, "deg": self.degree, "rank": self.rank, "a": self.a, "b": self.b}


def ideal_cohomology(scheme, d, field):
    d = as_bidegree(d)
    if d.a < 0 or d.b < 0:
        raise ParameterError("nonnegative bidegree required")
    rows = condition_rows(scheme, d, field)
    r = rank(rows, field)
    report = CohomologyReport(d.a, d.b, d.dim - r, scheme.degree - r, scheme.degree, r)
    logger.debug("h^i(I(%d,%d)) deg=%d rank=%d -> h0=%d h1=%d", d.a, d.b, report.degree, r, report.h0, report.h1)
    return report


def member_basis(scheme, d, field):
    """Kernel basis of the condition rows: a basis of H^0(I_scheme(a,b))."""
    d = as_bidegree(d)
    return kernel_basis(condition_rows(scheme, d, field), field)


def random_member(scheme, d, field, rng):
    """Random combination of a kernel basis; always vanishes on the scheme."""
    d = as_bidegree(d)
    basis = member_basis(scheme, d, field)
    if not basis:
        raise EmptySystemError("system is empty")
    while True:
        coeffs = field.zeros(d.dim)
        for vec in basis:
            coeffs = field.reduce(coeffs + vec * field.random_element(rng))
        if any(c != 0 for c in coeffs):
            break
    form = BiForm(d.a, d.b, coeffs, field)
    assert not any(field.dot(condition_rows(scheme, d, field), coeffs) != 0)
    return form
