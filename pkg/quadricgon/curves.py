"""
curves.py - Nodal curves on Q with prescribed nodes.

- `build_nodal_curve()`: a random Y in |I_{2S}(a,b)|, certified nodal at S.
- `build_tangent_curve()`: same, also through two ruling-tangent schemes Z, Z'.
- `check_nodal_report()`: replays every certificate from (form, S).

What a report certifies:
- h^0 of the linear system matches the expected count.
- Each node has value 0, gradient 0 and a nonzero Hessian determinant in its chart.
- No extra singular point lies on the scanned first-coordinate slices (see
  `singularity_scan`).
- No ruling line through a node is a component, and S avoids the configurations
  that would force a line or (1,1) component.
Irreducibility beyond that is not certified; reports say so.
"""

import logging
from dataclasses import dataclass, field as dc_field

from .cohomology import ideal_cohomology, random_member
from .config import DEFAULT_REDRAWS, DEFAULT_RESAMPLE_CAP, DEFAULT_SCAN_SLICES, DEFAULT_SEARCH_CAP
from .errors import DegenerateWitnessError, ParameterError, PreconditionError, SpecialConfigurationError
from .position import PositionRequirements, max_on_curve_type, sample_points
from .quadric import (
    FIRST,
    LINE_TYPES,
    SECOND,
    PointScheme,
    QuadricPoint,
    RulingLine,
    RulingTangent,
    common_root_count,
    line_through,
)

logger = logging.getLogger(__name__)

IRREDUCIBILITY_NOTE = "irreducibility assumed for a general member; only line and conic components are excluded"
SCAN_SCOPE = "first coordinate rational, second coordinate over the algebraic closure"


def genus(a, m, x):
    """Geometric genus of a curve of type (a, a+m) with x nodes."""
    if a < 1 or m < 0 or x < 0:
        raise ParameterError("genus needs a >= 1, m >= 0, x >= 0")
    return a * a + a * m - 2 * a - m + 1 - x


def sample_general_nodes(x, field, rng, requirements=PositionRequirements(), resample_cap=DEFAULT_RESAMPLE_CAP,
                         search_cap=DEFAULT_SEARCH_CAP):
    if x < 0:
        raise ParameterError("x must be nonnegative")
    return sample_points(x, field, rng, requirements, resample_cap, search_cap)


def sample_tangency_points(S, field, rng, resample_cap=DEFAULT_RESAMPLE_CAP):
    """Two points off each other's rulings and off the rulings through S."""
    lines_only = PositionRequirements((((1, 0), 1), ((0, 1), 1)), avoid=tuple(S))
    return sample_points(2, field, rng, lines_only, resample_cap)


@dataclass(frozen=True)
class NodeCertificate:
    point: QuadricPoint
    value: object
    gradient: tuple
    hessian_det: object

    @property
    def passed(self):
        return self.value == 0 and all(g == 0 for g in self.gradient) and self.hessian_det != 0

    def to_json(self, field):
        return {
            "point": self.point.to_json(field),
            "value": field.to_str(self.value),
            "gradient": [field.to_str(g) for g in self.gradient],
            "hessian_det": field.to_str(self.hessian_det),
            "passed": self.passed,
        }


def node_certificate(form, P):
    field = form.field
    jet = form.chart_jet(P)
    det = field.sub(field.mul(jet["xx"], jet["yy"]), field.mul(jet["xy"], jet["xy"]))
    return NodeCertificate(P, jet["f"], (jet["x"], jet["y"]), det)


@dataclass(frozen=True)
class ScanResult:
    coords: tuple
    full: bool
    found: list

    @property
    def slices(self):
        return len(self.coords)

    @property
    def clean(self):
        return not self.found

    def to_json(self):
        return {"scope": SCAN_SCOPE, "slices": self.slices, "full": self.full, "found": list(self.found)}


def _scan_slices(nodes, field, rng, slices, full):
    if full and field.p is not None:
        return [(field(y), field(1)) for y in range(field.p)] + [(field(1), field(0))]
    coords = [P.first for P in nodes]
    coords += [(field(field.random_element(rng)), field(1)) for _ in range(slices)]
    return list(dict.fromkeys(coords))


def _suspicious_slices(form, nodes, coords):
    """
    On each slice {c} x P^1 the singular points of Y are the common roots of the four
    homogeneous partials restricted there; the count must equal the nodes on it.
    """
    field = form.field
    partials = [form.partial(var) for var in "stuv"]
    per_slice = {}
    for P in nodes:
        per_slice[P.first] = per_slice.get(P.first, 0) + 1
    found = []
    for c in coords:
        line = RulingLine((1, 0), c)
        common = common_root_count([g.restrict(line) for g in partials])
        expected = per_slice.get(c, 0)
        if common is None or common > expected:
            found.append({"slice": [field.to_str(x) for x in c], "common_roots": common, "nodes": expected})
    return found


def singularity_scan(form, nodes, field, rng, slices=DEFAULT_SCAN_SLICES, full=False):
    coords = tuple(_scan_slices(nodes, field, rng, slices, full))
    found = _suspicious_slices(form, nodes, coords)
    logger.debug("singularity scan: %d slices, %d suspicious", len(coords), len(found))
    return ScanResult(coords, bool(full and field.p is not None), found)


def _configuration_problems(nodes, a, b, field, search_cap):
    """Node configurations that would force a line or (1,1) component."""
    problems = []
    if not nodes:
        return problems
    for kind in LINE_TYPES:
        count = max_on_curve_type(nodes, kind, field).count
        if count >= a - 1:
            problems.append(f"{count} nodes on a line of type {kind}")
    if len(nodes) >= a + b - 2:
        count = max_on_curve_type(nodes, (1, 1), field, search_cap).count
        if count >= a + b - 2:
            problems.append(f"{count} nodes on a (1,1) curve")
    return problems


def _line_components(form, nodes):
    problems = []
    for P in nodes:
        for kind in LINE_TYPES:
            if form.restrict(line_through(P, kind)).is_zero():
                problems.append(f"line of type {kind} through a node is a component")
    return problems


@dataclass
class NodalCurveReport:
    form: object
    a: int
    b: int
    nodes: list
    h0: int
    h0_expected: int
    node_certificates: list = dc_field(default_factory=list)
    scan: ScanResult = None
    component_problems: list = dc_field(default_factory=list)
    tangency_points: tuple = None
    fiber_counts: dict = None
    redraws: int = 1

    @property
    def m(self):
        return self.b - self.a

    @property
    def x(self):
        return len(self.nodes)

    @property
    def h0_check(self):
        return self.h0 == self.h0_expected

    @property
    def fibers_ok(self):
        if self.fiber_counts is None:
            return True
        fc = self.fiber_counts
        return (fc["D1_distinct"], fc["D1_repeated"], fc["D2_distinct"], fc["D2_repeated"]) == (
            self.b - 1, 1, self.a - 1, 1)

    @property
    def passed(self):
        return (
            self.h0_check
            and all(c.passed for c in self.node_certificates)
            and (self.scan is None or self.scan.clean)
            and not self.component_problems
            and self.fibers_ok
        )

    @property
    def genus(self):
        if not self.passed:
            return None
        return genus(self.a, self.m, self.x)

    @property
    def arithmetic_genus(self):
        return (self.a - 1) * (self.b - 1)

    def to_json(self):
        field = self.form.field
        data = {
            "a": self.a,
            "b": self.b,
            "m": self.m,
            "x": self.x,
            "p": field.p,
            "form": self.form.to_json(),
            "nodes": [P.to_json(field) for P in self.nodes],
            "h0": self.h0,
            "h0_expected": self.h0_expected,
            "h0_check": self.h0_check,
            "node_certificates": [c.to_json(field) for c in self.node_certificates],
            "singularity_scan": None if self.scan is None else self.scan.to_json(),
            "component_problems": list(self.component_problems),
            "irreducibility": IRREDUCIBILITY_NOTE,
            "arithmetic_genus": self.arithmetic_genus,
            "genus": self.genus,
            "redraws": self.redraws,
            "passed": self.passed,
        }
        if self.tangency_points is not None:
            data["tangency_points"] = [P.to_json(field) for P in self.tangency_points]
            data["fiber_counts"] = dict(self.fiber_counts)
        return data


def _fiber_counts(form, P1, P2):
    on_d1 = form.restrict(line_through(P1, (1, 0)))
    on_d2 = form.restrict(line_through(P2, (0, 1)))
    return {
        "D1_distinct": on_d1.distinct_roots(),
        "D1_repeated": on_d1.repeated_degree(),
        "D2_distinct": on_d2.distinct_roots(),
        "D2_repeated": on_d2.repeated_degree(),
    }


def _certify(form, a, b, nodes, h0, h0_expected, config_problems, rng, scan_slices, full_scan, tangency):
    report = NodalCurveReport(form, a, b, list(nodes), h0, h0_expected)
    report.node_certificates = [node_certificate(form, P) for P in nodes]
    report.component_problems = list(config_problems) + _line_components(form, nodes)
    if tangency is not None:
        report.tangency_points = tangency
        report.fiber_counts = _fiber_counts(form, *tangency)
    report.scan = singularity_scan(form, nodes, form.field, rng, scan_slices, full_scan)
    return report


def _check_sizes(a, b, x, cap, cap_label):
    if not 4 <= a <= b:
        raise PreconditionError(f"need b >= a >= 4, got a={a}, b={b}")
    if x < 0 or 3 * x > cap:
        raise PreconditionError(f"need 0 <= 3x <= {cap_label}, got x={x}")


def _draw_certified(scheme, a, b, nodes, h0_expected, field, rng, redraws, scan_slices, full_scan,
                    search_cap, tangency=None):
    coh = ideal_cohomology(scheme, (a, b), field)
    if coh.h0 != h0_expected:
        raise SpecialConfigurationError(f"special node configuration: h0 = {coh.h0}, expected {h0_expected}")
    config_problems = _configuration_problems(nodes, a, b, field, search_cap)
    report = None
    for attempt in range(1, redraws + 1):
        form = random_member(scheme, (a, b), field, rng)
        report = _certify(form, a, b, nodes, coh.h0, h0_expected, config_problems, rng, scan_slices, full_scan,
                          tangency)
        report.redraws = attempt
        if report.passed:
            break
        logger.info("curve draw %d failed certification, redrawing", attempt)
    return report


def build_nodal_curve(a, b, S, field, rng, redraws=DEFAULT_REDRAWS, scan_slices=DEFAULT_SCAN_SLICES,
                      full_scan=False, search_cap=DEFAULT_SEARCH_CAP):
    """General Y in |I_{2S}(a,b)| with h0 = (a+1)(b+1) - 3x; returns the last draw if none certifies."""
    S = list(S)
    _check_sizes(a, b, len(S), a * b, "ab")
    expected = (a + 1) * (b + 1) - 3 * len(S)
    return _draw_certified(PointScheme.fat(S), a, b, S, expected, field, rng, redraws, scan_slices, full_scan,
                           search_cap)


def build_tangent_curve(a, b, S, P1, P2, field, rng, redraws=DEFAULT_REDRAWS, scan_slices=DEFAULT_SCAN_SLICES,
                        full_scan=False, search_cap=DEFAULT_SEARCH_CAP):
    """
    Y through 2S, Z = tangent at P1 inside its (1,0)-line D1 and Z' = tangent at P2
    inside its (0,1)-line D2. Y meets D1 in b-1 and D2 in a-1 distinct points.
    """
    S = list(S)
    _check_sizes(a, b, len(S), (a - 1) * (b - 1), "(a-1)(b-1)")
    if P1 == P2 or P1.first == P2.first or P1.second == P2.second:
        raise PreconditionError("P1 and P2 must lie on distinct rulings")
    for P in (P1, P2):
        if any(Q.first == P.first or Q.second == P.second for Q in S):
            raise PreconditionError("tangency point shares a ruling line with a node")
    Z = RulingTangent(P1, SECOND)
    Z_prime = RulingTangent(P2, FIRST)
    scheme = PointScheme.fat(S) + PointScheme((Z, Z_prime))
    expected = (a + 1) * (b + 1) - 3 * len(S) - 4
    return _draw_certified(scheme, a, b, S, expected, field, rng, redraws, scan_slices, full_scan, search_cap,
                           tangency=(P1, P2))


def check_nodal_report(report):
    """Re-derive node certificates, the singularity scan, fibre counts and genus from (form, S)."""
    problems = []
    form = report.form
    for cert in report.node_certificates:
        replay = node_certificate(form, cert.point)
        if replay != cert:
            problems.append("node certificate does not replay")
    if [c.point for c in report.node_certificates] != list(report.nodes):
        problems.append("certificates do not cover the nodes")
    if report.scan is not None and _suspicious_slices(form, report.nodes, report.scan.coords) != report.scan.found:
        problems.append("singularity scan does not replay")
    if report.tangency_points is not None and _fiber_counts(form, *report.tangency_points) != report.fiber_counts:
        problems.append("fibre counts do not replay")
    if _line_components(form, report.nodes):
        problems.append("a ruling line through a node is a component")
    if report.passed and report.genus != genus(report.a, report.m, report.x):
        problems.append("genus does not match the formula")
    return problems


def find_curve_point(form, rng, tries=DEFAULT_RESAMPLE_CAP):
    """A smooth field-rational point of the curve form = 0."""
    field = form.field
    for _ in range(tries):
        c = (field(field.random_element(rng)), field(1))
        for r in form.restrict(RulingLine((1, 0), c)).field_roots():
            P = QuadricPoint(c, r)
            jet = form.chart_jet(P)
            if jet["x"] != 0 or jet["y"] != 0:
                return P
    raise DegenerateWitnessError("no smooth rational point found on the curve")
