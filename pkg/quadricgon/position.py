"""
position.py - Incidence maxima of point sets on Q and the general-position checks.

The maximum number of points on a curve of type (c,d) is computed exactly:
- (1,0) / (0,1): group the points by their first / second coordinate.
- (1,1), (2,1), (1,2): if the points impose at most k-1 conditions (k = h^0 of the
  type) they all lie on one curve. Otherwise the maximising curve passes through
  an independent (k-2)-subset, so it is a member of that subset's pencil. For each
  pencil we key every point by the member through it (e2/e1, or infinity) and take
  base points + the largest key class.

Ties go to the first (k-2)-subset in lexicographic order, then to the member
through the smallest point index, so witnesses are reproducible.
"""

import logging
from dataclasses import dataclass, field as dc_field
from itertools import combinations

import numpy as np

from .config import DEFAULT_RESAMPLE_CAP, DEFAULT_SEARCH_CAP, GENERIC_MEMBER_SEED
from .errors import CollidingSupportsError, GeneralPositionError, HypothesisError, ParameterError, SearchCapError
from .exactlinalg import batched_pencil_basis, inverse_mod, kernel_basis
from .quadric import BiForm, PointScheme, RulingLine, as_bidegree, condition_rows, line_through, random_point

logger = logging.getLogger(__name__)

SUPPORTED_TYPES = ((1, 0), (0, 1), (1, 1), (2, 1), (1, 2))

# Subsets handled per batched elimination
_CHUNK = 8192


@dataclass(frozen=True)
class CurveMaximum:
    curve_type: tuple
    count: int
    witness: BiForm
    incident: tuple

    def to_json(self):
        return {
            "type": list(self.curve_type),
            "count": self.count,
            "incident": list(self.incident),
            "witness": self.witness.to_json(),
        }


def generic_member(basis, d, field):
    """A fixed-seed combination of a kernel basis (the basis vector itself if unique)."""
    d = as_bidegree(d)
    if len(basis) == 1:
        return BiForm(d.a, d.b, basis[0], field)
    rng = np.random.default_rng(GENERIC_MEMBER_SEED)
    while True:
        coeffs = field.zeros(d.dim)
        for vec in basis:
            coeffs = field.reduce(coeffs + vec * field.random_element(rng))
        if any(c != 0 for c in coeffs):
            return BiForm(d.a, d.b, coeffs, field)


def incident_indices(form, points):
    return tuple(i for i, P in enumerate(points) if form.contains(P))


def _ruling_maximum(points, kind, field):
    groups = {}
    for i, P in enumerate(points):
        groups.setdefault(P.first if kind == (1, 0) else P.second, []).append(i)
    if not groups:
        line = RulingLine(kind, (field(0), field(1)))
        return CurveMaximum(kind, 0, line.as_biform(field), ())
    # max() keeps the first maximal group, i.e. the one with the smallest index
    best = max(groups.values(), key=len)
    line = line_through(points[best[0]], kind)
    return CurveMaximum(kind, len(best), line.as_biform(field), tuple(best))


def _class_counts(e1, e2, p):
    """Per row: base points + largest class of equal keys e2/e1 (infinity when e1 = 0)."""
    base = (e1 == 0) & (e2 == 0)
    safe = np.where(e1 != 0, e1, 1)
    keys = np.where(e1 != 0, e2 * inverse_mod(safe, p) % p, p)
    keys = np.where(base, -1, keys)
    order = np.argsort(keys, axis=1, kind="stable")
    sk = np.take_along_axis(keys, order, axis=1)
    rows, n = sk.shape
    new_run = np.ones(sk.shape, dtype=bool)
    new_run[:, 1:] = sk[:, 1:] != sk[:, :-1]
    # Offset run ids per row so one flat accumulator serves the whole batch
    run_id = np.cumsum(new_run, axis=1) - 1 + (np.arange(rows) * n)[:, None]
    sizes = np.zeros(rows * n, dtype=np.int64)
    np.add.at(sizes, run_id[sk >= 0], 1)
    return base.sum(axis=1) + sizes.reshape(rows, n).max(axis=1)


def _pencil_classes(V, subset, field):
    """Pencil through the subset's conditions and the point classes of its members."""
    basis = kernel_basis(V[list(subset)], field)
    if len(basis) != 2:
        return None
    f1, f2 = basis
    e1, e2 = field.dot(V, f1), field.dot(V, f2)
    base, classes = [], {}
    for i in range(V.shape[0]):
        if e1[i] == 0 and e2[i] == 0:
            base.append(i)
        else:
            key = field.div(e2[i], e1[i]) if e1[i] != 0 else None
            classes.setdefault(key, []).append(i)
    return f1, f2, base, classes


def _scalar_count(V, subset, field):
    found = _pencil_classes(V, subset, field)
    if found is None:
        return -1
    _, _, base, classes = found
    return len(base) + max((len(c) for c in classes.values()), default=0)


def _sweep_counts(V, subsets, field):
    counts = np.full(len(subsets), -1, dtype=np.int64)
    if not field.vectorized:
        for n, subset in enumerate(subsets):
            counts[n] = _scalar_count(V, subset, field)
        return counts
    p = field.p
    Vt = V.T
    for start in range(0, len(subsets), _CHUNK):
        chunk = subsets[start:start + _CHUNK]
        ok, basis = batched_pencil_basis(V[chunk], p)
        good = np.flatnonzero(ok)
        if good.size:
            values = (basis[good] @ Vt) % p
            counts[start + good] = _class_counts(values[:, 0, :], values[:, 1, :], p)
        # Pivots outside the leading columns: redo exactly, one subset at a time
        for j in np.flatnonzero(~ok):
            counts[start + j] = _scalar_count(V, chunk[j], field)
        logger.debug("pencil sweep: %d/%d subsets", min(start + _CHUNK, len(subsets)), len(subsets))
    return counts


def _pencil_maximum(points, curve_type, field):
    d = as_bidegree(curve_type)
    k = d.dim
    V = condition_rows(PointScheme.reduced(points), d, field)
    basis = kernel_basis(V, field)
    if basis:
        # Rank <= k-1: one curve carries every point
        witness = generic_member(basis, d, field)
        return CurveMaximum(curve_type, len(points), witness, incident_indices(witness, points))
    subsets = np.array(list(combinations(range(len(points)), k - 2)), dtype=np.int64)
    counts = _sweep_counts(V, subsets, field)
    best = int(np.argmax(counts))
    f1, f2, base, classes = _pencil_classes(V, subsets[best], field)
    key, members = max(classes.items(), key=lambda kv: len(kv[1]))
    if key is None:
        coeffs = f1
    else:
        coeffs = field.reduce(f1 * key - f2)
    witness = BiForm(d.a, d.b, coeffs, field)
    count = len(base) + len(members)
    assert count == counts[best]
    return CurveMaximum(curve_type, count, witness, tuple(sorted(base + members)))


def max_on_curve_type(points, curve_type, field, search_cap=DEFAULT_SEARCH_CAP):
    """Exact maximum of |points on T| over curves T of the given type, with a witness."""
    curve_type = tuple(curve_type)
    if curve_type not in SUPPORTED_TYPES:
        raise ParameterError(f"unsupported curve type {curve_type}")
    points = list(points)
    if len(set(points)) != len(points):
        raise CollidingSupportsError()
    if curve_type in ((1, 0), (0, 1)):
        return _ruling_maximum(points, curve_type, field)
    if len(points) > search_cap:
        raise SearchCapError(len(points), search_cap)
    return _pencil_maximum(points, curve_type, field)


@dataclass(frozen=True)
class PositionReport:
    maxima: dict

    @property
    def max_on_line_first(self):
        return self.maxima[(1, 0)].count

    @property
    def max_on_line_second(self):
        return self.maxima[(0, 1)].count

    @property
    def max_on_11(self):
        return self.maxima[(1, 1)].count

    @property
    def max_on_21(self):
        return self.maxima[(2, 1)].count

    @property
    def max_on_12(self):
        return self.maxima[(1, 2)].count

    @property
    def witnesses(self):
        return {t: m.witness for t, m in self.maxima.items()}

    def to_json(self):
        return {
            "max_on_line_first": self.max_on_line_first,
            "max_on_line_second": self.max_on_line_second,
            "max_on_11": self.max_on_11,
            "max_on_21": self.max_on_21,
            "max_on_12": self.max_on_12,
            "maxima": [self.maxima[t].to_json() for t in SUPPORTED_TYPES],
        }


def position_report(points, field, search_cap=DEFAULT_SEARCH_CAP):
    return PositionReport({t: max_on_curve_type(points, t, field, search_cap) for t in SUPPORTED_TYPES})


# --- general-position predicates ---------------------------------------------

# Generic points: no 2 on a line, <= 3 on a (1,1) curve, <= 5 on a (2,1) or (1,2) curve
GENERAL_BOUNDS = (((1, 0), 1), ((0, 1), 1), ((1, 1), 3), ((2, 1), 5), ((1, 2), 5))


@dataclass(frozen=True)
class PositionRequirements:
    bounds: tuple = GENERAL_BOUNDS
    # Points whose two ruling lines the sample must avoid
    avoid: tuple = ()

    def violations(self, points, field, search_cap=DEFAULT_SEARCH_CAP):
        found = []
        points = list(points)
        for P in self.avoid:
            if any(Q.first == P.first or Q.second == P.second for Q in points):
                found.append("shares a ruling line with an excluded point")
                break
        for curve_type, bound in self.bounds:
            if len(points) <= bound:
                continue
            best = max_on_curve_type(points, curve_type, field, search_cap)
            if best.count > bound:
                found.append(f"{best.count} points on a curve of type {curve_type} (bound {bound})")
        return found


def sample_points(n, field, rng, requirements=PositionRequirements(), resample_cap=DEFAULT_RESAMPLE_CAP,
                  search_cap=DEFAULT_SEARCH_CAP):
    """n random points satisfying the requirements, redrawn until they do."""
    for attempt in range(1, resample_cap + 1):
        points = [random_point(field, rng) for _ in range(n)]
        if len(set(points)) == n and not requirements.violations(points, field, search_cap):
            if attempt > 1:
                logger.info("general position realized after %d draws", attempt)
            return points
    raise GeneralPositionError()


@dataclass(frozen=True)
class HypothesisCheck:
    lemma: str
    violations: list = dc_field(default_factory=list)

    @property
    def passed(self):
        return not self.violations

    def require(self):
        if self.violations:
            raise HypothesisError(f"{self.lemma} hypotheses fail", self.violations)
        return self

    def to_json(self):
        return {"lemma": self.lemma, "passed": self.passed, "violations": list(self.violations)}


def e4_bounds(u):
    return (((1, 0), 1), ((0, 1), 1), ((1, 1), 2 * u + 1), ((2, 1), 3 * u + 1), ((1, 2), 3 * u - 4))


def g4_bounds(u):
    return (((1, 1), 2 * u - 2), ((2, 1), 3 * u - 4), ((1, 2), 3 * u - 9))


def check_e4_hypotheses(E, u, v, field, search_cap=DEFAULT_SEARCH_CAP):
    """Size bound |E| <= v-u+10*floor(u/3), no 2 on a line and the three curve bounds."""
    if u < 9 or v < u:
        raise ParameterError(f"out of lemma range: need v >= u >= 9, got u={u}, v={v}")
    E = list(E)
    alpha = u // 3
    violations = []
    if len(E) > v - u + 10 * alpha:
        violations.append(f"|E| = {len(E)} > v-u+10*alpha = {v - u + 10 * alpha}")
    violations += PositionRequirements(e4_bounds(u)).violations(E, field, search_cap)
    return HypothesisCheck("e4", violations)


def check_g4_hypotheses(S, B, alpha, beta, field, search_cap=DEFAULT_SEARCH_CAP):
    """|S| <= (beta+1)^2, |B| <= 10*alpha, no 2 of S+B on a line, curve bounds on B."""
    if alpha < 3 or beta < 2:
        raise ParameterError(f"out of lemma range: need alpha >= 3, beta >= 2, got {alpha}, {beta}")
    S, B = list(S), list(B)
    u = 3 * alpha + beta
    violations = []
    if len(S) > (beta + 1) ** 2:
        violations.append(f"|S| = {len(S)} > (beta+1)^2 = {(beta + 1) ** 2}")
    if len(B) > 10 * alpha:
        violations.append(f"|B| = {len(B)} > 10*alpha = {10 * alpha}")
    both = S + B
    if len(set(both)) != len(both):
        violations.append("S and B share a point")
    else:
        violations += PositionRequirements((((1, 0), 1), ((0, 1), 1))).violations(both, field, search_cap)
    violations += PositionRequirements(g4_bounds(u)).violations(B, field, search_cap)
    return HypothesisCheck("g4", violations)
