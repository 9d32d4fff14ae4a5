"""
horace.py - Peeling certificates for h^1(I_E(u,v)) = 0.

A run removes, round after round, the points on a maximal (2,1) curve A_i and then
on a maximal (1,2) curve D_i, lowering the bidegree by (2,1) and (1,2) each time:

    round i:  (u-3i+3, u-3i+3) --A_i--> (u-3i+1, u-3i+2) --D_i--> (u-3i, u-3i)

Each removal is justified by a restriction check on the curve (`restriction_h1_vanishes`)
and each count is audited against the per-round thresholds. After floor(u/3) rounds
the leftover points are checked directly at (beta, beta).

Two modes:
- e4: one general set E, with a preliminary horizontal peel onto v-u (0,1)-lines
  when v > u.
- g4: general S plus B; curves are chosen maximal for the B-part, removal takes
  every remaining point on the curve.

A certificate is replayable: `check_certificate()` re-verifies incidences, counts,
thresholds, restriction verdicts and the residual without searching again.
"""

import logging
from dataclasses import dataclass, field as dc_field

from .cohomology import ideal_cohomology
from .config import DEFAULT_RESAMPLE_CAP, DEFAULT_SEARCH_CAP
from .errors import CertificateInvariantError, GeneralPositionError, NotIncidentError, ParameterError
from .exactlinalg import Field
from .position import (
    PositionRequirements,
    check_e4_hypotheses,
    check_g4_hypotheses,
    e4_bounds,
    max_on_curve_type,
    sample_points,
)
from .quadric import (
    BinaryForm,
    PointScheme,
    QuadricPoint,
    RulingLine,
    as_bidegree,
    biform_from_json,
    common_root_count,
    point_from_json,
)

logger = logging.getLogger(__name__)

E4 = "e4"
G4 = "g4"
MODES = (E4, G4)

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"

IRREDUCIBLE = "irreducible"
CONIC_AND_LINE = "conic+line"
THREE_LINES = "three lines"
NON_REDUCED = "non-reduced"

H1_ZERO = "h1=0"


# --- restriction to one curve --------------------------------------------------


@dataclass(frozen=True)
class RestrictionCheck:
    curve_type: tuple
    shape: str
    verdict: str
    counts: dict = dc_field(default_factory=dict)

    @property
    def passed(self):
        return self.verdict == PASS

    def to_json(self):
        return {"type": list(self.curve_type), "shape": self.shape, "verdict": self.verdict, "counts": dict(self.counts)}


def _swap_point(P):
    return QuadricPoint(P.second, P.first)


def _classify_21(f):
    """
    Shape of a (2,1) curve. f = u*q_u(s,t) + v*q_v(s,t); returns (shape, parts) where
    parts carries what the count criteria need.
    """
    field = f.field
    grid = f.grid()
    q_v = BinaryForm(2, tuple(grid[:, 0]), field)
    q_u = BinaryForm(2, tuple(grid[:, 1]), field)
    proportional = all(
        field.sub(field.mul(grid[i, 0], grid[k, 1]), field.mul(grid[k, 0], grid[i, 1])) == 0
        for i in range(3) for k in range(3)
    )
    if proportional:
        # f = q(s,t) * l(u,v)
        row = next(i for i in range(3) if grid[i, 0] != 0 or grid[i, 1] != 0)
        col = 0 if grid[row, 0] != 0 else 1
        q = BinaryForm(2, tuple(grid[:, col]), field)
        ell = BinaryForm(1, (grid[row, 0], grid[row, 1]), field)
        if q.distinct_roots() < 2:
            return NON_REDUCED, {}
        return THREE_LINES, {"q": q, "ell": ell}
    if common_root_count([q_u, q_v]) == 0:
        return IRREDUCIBLE, {}
    root = next(r for r in q_u.field_roots() + q_v.field_roots() if q_u.evaluate(r) == 0 and q_v.evaluate(r) == 0)
    line = RulingLine((1, 0), root)
    conic = f.divide_exact(line.as_biform(field))
    if conic is None:
        raise CertificateInvariantError("line factor does not divide the curve")
    return CONIC_AND_LINE, {"line": line, "conic": conic}


def _line_count(points, key):
    groups = {}
    for P in points:
        groups[key(P)] = groups.get(key(P), 0) + 1
    return max(groups.values(), default=0)


def restriction_h1_vanishes(curve, pts, d, field=None):
    """
    Count criterion for h^1(D, I_{pts,D}(d)) = 0 on a (2,1) or (1,2) curve D:
    - irreducible: |pts| <= deg O_D(d) + 1
    - conic + line: <= 1 per line, <= u+v+1 on the conic, total as irreducible
    - three lines: <= 1 per line
    A non-reduced curve gets the verdict "inconclusive".
    """
    field = field or curve.field
    U, V = as_bidegree(d).a, as_bidegree(d).b
    pts = list(pts)
    if not all(curve.contains(P) for P in pts):
        raise NotIncidentError()
    curve_type = (curve.a, curve.b)
    if curve_type == (1, 2):
        curve, pts, (U, V) = curve.swap(), [_swap_point(P) for P in pts], (V, U)
    elif curve_type != (2, 1):
        raise ParameterError(f"restriction criterion needs a (2,1) or (1,2) curve, got {curve_type}")

    shape, parts = _classify_21(curve)
    counts = {"points": len(pts)}
    if shape == NON_REDUCED:
        verdict = INCONCLUSIVE
    elif shape == IRREDUCIBLE:
        counts["bound"] = 2 * V + U + 1
        verdict = PASS if len(pts) <= 2 * V + U + 1 else FAIL
    elif shape == CONIC_AND_LINE:
        on_line = [P for P in pts if parts["line"].contains(P)]
        on_conic = [P for P in pts if parts["conic"].contains(P)]
        counts.update(line=len(on_line), conic=len(on_conic), conic_bound=U + V + 1)
        ok = len(on_line) <= 1 and len(on_conic) <= U + V + 1 and len(pts) <= 2 * V + U + 1
        verdict = PASS if ok else FAIL
    else:
        q, ell = parts["q"], parts["ell"]
        # Non-rational lines of q meet no rational point
        per_first = _line_count([P for P in pts if q.evaluate(P.first) == 0], lambda P: P.first)
        on_ell = sum(1 for P in pts if ell.evaluate(P.second) == 0)
        counts.update(max_per_line=max(per_first, on_ell))
        verdict = PASS if max(per_first, on_ell) <= 1 else FAIL
    return RestrictionCheck(curve_type, shape, verdict, counts)


# --- thresholds ----------------------------------------------------------------


@dataclass(frozen=True)
class Thresholds:
    i: int
    u: int
    mode: str
    a_bound: int
    b_bound: int
    f_bound: int
    g_bound: int
    phi: int
    psi: int
    tau: int
    eta: int

    def to_json(self):
        return dict(self.__dict__)


def threshold_functions(i, u, mode):
    """Per-round bounds on a_i, b_i (and |F_i|, |G_i| in g4) plus the counting functions at t = i."""
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}")
    if not 1 <= i <= u // 3:
        raise ParameterError(f"round {i} outside 1..{u // 3}")
    t = i
    if mode == E4:
        return Thresholds(
            i, u, mode,
            a_bound=3 * u - 9 * i + 10,
            b_bound=3 * u - 9 * i + 5,
            f_bound=None,
            g_bound=None,
            phi=t * (3 * u + 16 - 9 * t) - 5,
            psi=t * (2 * u + 13 - 6 * t) - 5,
            tau=t * (3 * u + 11 - 9 * t),
            eta=t * (4 * u - 12 * t + 11),
        )
    return Thresholds(
        i, u, mode,
        a_bound=3 * u - 9 * i + 5,
        b_bound=3 * u - 9 * i,
        f_bound=3 * u - 9 * i + 10,
        g_bound=3 * u - 9 * i + 5,
        phi=t * (3 * u + 11 - 9 * t) - 5,
        psi=t * (2 * u + 10 - 6 * t) - 5,
        tau=t * (3 * u + 6 - 9 * t),
        eta=t * (4 * u + 5 - 12 * t),
    )


def _audit(th, a_i, f_size, b_i, g_size):
    audit = {"i": th.i, "a_ok": a_i <= th.a_bound, "b_ok": b_i <= th.b_bound}
    if th.mode == G4:
        audit["f_ok"] = f_size <= th.f_bound
        audit["g_ok"] = g_size <= th.g_bound
    return audit


# --- certificates ----------------------------------------------------------------


@dataclass(frozen=True)
class PeelStep:
    i: int
    curve_A: object
    removed_F: list
    a_i: int
    restriction_A: RestrictionCheck
    curve_D: object
    removed_G: list
    b_i: int
    restriction_D: RestrictionCheck
    residual_size: int


@dataclass(frozen=True)
class HorizontalPeel:
    """The v > u reduction: v-u disjoint (0,1)-lines, each absorbing at most one point."""

    lines: list
    absorbed: list


@dataclass
class HoraceCertificate:
    mode: str
    u: int
    v: int
    alpha: int
    beta: int
    field: Field
    E: list = dc_field(default_factory=list)
    S: list = dc_field(default_factory=list)
    B: list = dc_field(default_factory=list)
    steps: list = dc_field(default_factory=list)
    horizontal_peel: HorizontalPeel = None
    residual: list = dc_field(default_factory=list)
    residual_h1: int = 0
    audits: list = dc_field(default_factory=list)
    conclusion: str = INCONCLUSIVE

    @property
    def residual_scheme(self):
        return PointScheme.reduced(self.residual)

    @property
    def points(self):
        return list(self.E) if self.mode == E4 else list(self.S) + list(self.B)

    @property
    def inconclusive(self):
        return self.conclusion != H1_ZERO

    def to_json(self):
        field = self.field

        def pts(points):
            return [P.to_json(field) for P in points]

        def form(f):
            return None if f is None else f.to_json()

        def check(c):
            return None if c is None else c.to_json()

        steps = [
            {
                "i": s.i,
                "A": form(s.curve_A),
                "F": pts(s.removed_F),
                "a_i": s.a_i,
                "restriction_A": check(s.restriction_A),
                "D": form(s.curve_D),
                "G": pts(s.removed_G),
                "b_i": s.b_i,
                "restriction_D": check(s.restriction_D),
                "residual_size": s.residual_size,
            }
            for s in self.steps
        ]
        horizontal = None
        if self.horizontal_peel is not None:
            horizontal = {
                "lines": [[field.to_str(c) for c in line] for line in self.horizontal_peel.lines],
                "absorbed": pts(self.horizontal_peel.absorbed),
            }
        data = {
            "mode": self.mode,
            "u": self.u,
            "v": self.v,
            "alpha": self.alpha,
            "beta": self.beta,
            "p": field.p,
            "input": {"E": pts(self.E)} if self.mode == E4 else {"S": pts(self.S), "B": pts(self.B)},
            "horizontal_peel": horizontal,
            "steps": steps,
            "residual": pts(self.residual),
            "residual_h1": self.residual_h1,
            "audits": self.audits,
            "conclusion": self.conclusion,
        }
        return data


def _restriction_from_json(data):
    if data is None:
        return None
    return RestrictionCheck(tuple(data["type"]), data["shape"], data["verdict"], dict(data.get("counts", {})))


def certificate_from_json(data):
    field = Field(data.get("p"))

    def pts(items):
        return [point_from_json(item, field) for item in items]

    def form(item):
        return None if item is None else biform_from_json(item, field)

    steps = [
        PeelStep(
            i=s["i"],
            curve_A=form(s["A"]),
            removed_F=pts(s["F"]),
            a_i=s["a_i"],
            restriction_A=_restriction_from_json(s.get("restriction_A")),
            curve_D=form(s["D"]),
            removed_G=pts(s["G"]),
            b_i=s["b_i"],
            restriction_D=_restriction_from_json(s.get("restriction_D")),
            residual_size=s["residual_size"],
        )
        for s in data["steps"]
    ]
    horizontal = None
    if data.get("horizontal_peel"):
        h = data["horizontal_peel"]
        horizontal = HorizontalPeel([tuple(field(c) for c in line) for line in h["lines"]], pts(h["absorbed"]))
    given = data.get("input", {})
    return HoraceCertificate(
        mode=data["mode"],
        u=data["u"],
        v=data["v"],
        alpha=data["alpha"],
        beta=data["beta"],
        field=field,
        E=pts(given.get("E", [])),
        S=pts(given.get("S", [])),
        B=pts(given.get("B", [])),
        steps=steps,
        horizontal_peel=horizontal,
        residual=pts(data["residual"]),
        residual_h1=data["residual_h1"],
        audits=list(data["audits"]),
        conclusion=data["conclusion"],
    )


# --- generators -----------------------------------------------------------------


def _filler_lines(count, used, field):
    """The first `count` coordinates [y:1], y = 0, 1, 2, ..., outside `used`."""
    lines = []
    y = 0
    while len(lines) < count:
        coord = (field(y), field(1))
        if coord not in used:
            lines.append(coord)
        y += 1
    return lines


def _horizontal_peel(E, u, v, field):
    absorbed = E[:min(len(E), v - u)]
    fillers = _filler_lines(v - u - len(absorbed), {P.second for P in E}, field)
    return HorizontalPeel([P.second for P in absorbed] + fillers, list(absorbed))


def _check_non_increasing(steps):
    for prev, cur in zip(steps, steps[1:]):
        if cur.a_i > prev.a_i or cur.b_i > prev.b_i:
            raise CertificateInvariantError(f"counts increase at round {cur.i}")


def _run_rounds(cert, carrier, tracked, search_cap):
    """
    Shared peeling loop. `tracked` selects the points curves are maximised over
    (the whole carrier in e4, the B-part in g4). Returns the final carrier.
    """
    field, u = cert.field, cert.u
    for i in range(1, cert.alpha + 1):
        if not tracked(carrier):
            break
        th = threshold_functions(i, u, cert.mode)
        d_A = (u - 3 * i + 3, u - 3 * i + 3)
        d_D = (u - 3 * i + 1, u - 3 * i + 2)

        A, F, a_i, check_A = _peel_once(carrier, tracked, (2, 1), d_A, field, search_cap)
        carrier = [P for P in carrier if P not in F]
        if a_i <= 4 and tracked(carrier):
            raise CertificateInvariantError(f"round {i}: a_i = {a_i} but points remain off A_i")

        D, G, b_i, check_D = _peel_once(carrier, tracked, (1, 2), d_D, field, search_cap)
        carrier = [P for P in carrier if P not in G]
        if D is not None and b_i <= 4 and tracked(carrier):
            raise CertificateInvariantError(f"round {i}: b_i = {b_i} but points remain off D_i")

        step = PeelStep(i, A, F, a_i, check_A, D, G, b_i, check_D, len(carrier))
        cert.steps.append(step)
        cert.audits.append(_audit(th, a_i, len(F), b_i, len(G)))
        logger.debug("round %d: a_i=%d |F|=%d b_i=%d |G|=%d left=%d", i, a_i, len(F), b_i, len(G), len(carrier))
    _check_non_increasing(cert.steps)
    return carrier


def _peel_once(carrier, tracked, curve_type, d, field, search_cap):
    part = tracked(carrier)
    if not part:
        return None, [], 0, None
    best = max_on_curve_type(part, curve_type, field, search_cap)
    removed = [P for P in carrier if best.witness.contains(P)]
    return best.witness, removed, best.count, restriction_h1_vanishes(best.witness, removed, d, field)


def _conclude(cert):
    restrictions_ok = all(
        check is None or check.passed for s in cert.steps for check in (s.restriction_A, s.restriction_D)
    )
    audits_ok = all(all(v for k, v in audit.items() if k != "i") for audit in cert.audits)
    residual_ok = cert.residual_h1 == 0
    if cert.mode == E4:
        residual_ok = residual_ok and not cert.residual
    else:
        residual_ok = residual_ok and set(cert.residual) <= set(cert.S)
    return H1_ZERO if (restrictions_ok and audits_ok and residual_ok) else INCONCLUSIVE


def peel_e4(E, u, v, field, search_cap=DEFAULT_SEARCH_CAP):
    E = list(E)
    check_e4_hypotheses(E, u, v, field, search_cap).require()
    alpha = u // 3
    cert = HoraceCertificate(E4, u, v, alpha, u - 3 * alpha, field, E=E)
    carrier = E
    if v > u:
        cert.horizontal_peel = _horizontal_peel(E, u, v, field)
        carrier = E[len(cert.horizontal_peel.absorbed):]
    carrier = _run_rounds(cert, carrier, lambda pts: pts, search_cap)
    cert.residual = carrier
    cert.residual_h1 = ideal_cohomology(cert.residual_scheme, (cert.beta, cert.beta), field).h1
    cert.conclusion = _conclude(cert)
    logger.info("peel-e4 u=%d v=%d |E|=%d: %s", u, v, len(E), cert.conclusion)
    return cert


def peel_g4(S, B, alpha, beta, field, search_cap=DEFAULT_SEARCH_CAP):
    S, B = list(S), list(B)
    check_g4_hypotheses(S, B, alpha, beta, field, search_cap).require()
    u = 3 * alpha + beta
    cert = HoraceCertificate(G4, u, u, alpha, beta, field, S=S, B=B)
    b_part = set(B)
    carrier = _run_rounds(cert, S + B, lambda pts: [P for P in pts if P in b_part], search_cap)
    cert.residual = carrier
    cert.residual_h1 = ideal_cohomology(cert.residual_scheme, (beta, beta), field).h1
    cert.conclusion = _conclude(cert)
    logger.info("peel-g4 alpha=%d beta=%d |S|=%d |B|=%d: %s", alpha, beta, len(S), len(B), cert.conclusion)
    return cert


# --- replay checker ---------------------------------------------------------------


@dataclass(frozen=True)
class CertificateCheck:
    problems: list

    @property
    def passed(self):
        return not self.problems

    def to_json(self):
        return {"passed": self.passed, "problems": list(self.problems)}


def _check_horizontal(cert, problems):
    h = cert.horizontal_peel
    if cert.v == cert.u:
        if h is not None:
            problems.append("horizontal peel recorded although v == u")
        return list(cert.E)
    if h is None:
        problems.append("missing horizontal peel")
        return list(cert.E)
    expected = min(len(cert.E), cert.v - cert.u)
    if len(h.absorbed) != expected or len(h.lines) != cert.v - cert.u:
        problems.append("horizontal peel has the wrong size")
    if len(set(h.lines)) != len(h.lines):
        problems.append("horizontal lines are not disjoint")
    for P, line in zip(h.absorbed, h.lines):
        if P not in cert.E or P.second != line:
            problems.append("absorbed point not on its line")
    kept = [P for P in cert.E if P not in h.absorbed]
    if any(P.second in set(h.lines) for P in kept):
        problems.append("kept point on a horizontal line")
    return kept


def check_certificate(cert):
    """Replay every recorded fact of a certificate. No incidence search is repeated."""
    problems = []
    field, u = cert.field, cert.u
    if cert.mode == E4:
        if cert.alpha != u // 3 or cert.beta != u - 3 * cert.alpha:
            problems.append("alpha/beta do not match u")
        carrier = _check_horizontal(cert, problems)
        tracked = list
    elif cert.mode == G4:
        if u != 3 * cert.alpha + cert.beta or cert.v != u:
            problems.append("u != 3*alpha + beta")
        carrier = list(cert.S) + list(cert.B)
        b_part = set(cert.B)

        def tracked(pts):
            return [P for P in pts if P in b_part]
    else:
        return CertificateCheck([f"unknown mode {cert.mode!r}"])

    audits = []
    for k, step in enumerate(cert.steps, start=1):
        if step.i != k:
            problems.append(f"round numbering broken at {k}")
        th = threshold_functions(step.i, u, cert.mode)
        removals = (
            ("A", step.curve_A, step.removed_F, step.a_i, step.restriction_A, (u - 3 * k + 3, u - 3 * k + 3)),
            ("D", step.curve_D, step.removed_G, step.b_i, step.restriction_D, (u - 3 * k + 1, u - 3 * k + 2)),
        )
        for name, curve, removed, count, check, d in removals:
            part = tracked(carrier)
            if curve is None:
                if part or removed or count:
                    problems.append(f"round {k}: {name} missing while points remain")
                continue
            on_curve = [P for P in carrier if curve.contains(P)]
            if set(on_curve) != set(removed):
                problems.append(f"round {k}: removed set differs from carrier points on {name}")
            if sum(1 for P in part if curve.contains(P)) != count:
                problems.append(f"round {k}: {name} count does not match its witness")
            if count < min(len(part), 5):
                problems.append(f"round {k}: {name} not maximal")
            replay = restriction_h1_vanishes(curve, removed, d, field)
            if check is None or replay.verdict != check.verdict:
                problems.append(f"round {k}: restriction verdict on {name} does not replay")
            carrier = [P for P in carrier if P not in set(removed)]
        if step.residual_size != len(carrier):
            problems.append(f"round {k}: residual size mismatch")
        audits.append(_audit(th, step.a_i, len(step.removed_F), step.b_i, len(step.removed_G)))
    if audits != list(cert.audits):
        problems.append("threshold audits do not replay")
    try:
        _check_non_increasing(cert.steps)
    except CertificateInvariantError as exc:
        problems.append(str(exc))
    if set(carrier) != set(cert.residual):
        problems.append("residual does not match the peeled carrier")
    h1 = ideal_cohomology(PointScheme.reduced(cert.residual), (cert.beta, cert.beta), field).h1
    if h1 != cert.residual_h1:
        problems.append("residual h1 does not replay")
    if _conclude(cert) != cert.conclusion:
        problems.append("conclusion does not follow from the recorded checks")
    return CertificateCheck(problems)


# --- samplers -------------------------------------------------------------------


def sample_e4_set(n, u, v, field, rng, resample_cap=DEFAULT_RESAMPLE_CAP, search_cap=DEFAULT_SEARCH_CAP):
    """n random points satisfying the e4 hypotheses for (u, v)."""
    if u < 9 or v < u:
        raise ParameterError(f"out of lemma range: need v >= u >= 9, got u={u}, v={v}")
    if n > v - u + 10 * (u // 3):
        raise ParameterError(f"|E| = {n} exceeds v-u+10*alpha = {v - u + 10 * (u // 3)}")
    return sample_points(n, field, rng, PositionRequirements(e4_bounds(u)), resample_cap, search_cap)


def sample_g4_sets(x, z, alpha, beta, field, rng, resample_cap=DEFAULT_RESAMPLE_CAP,
                   search_cap=DEFAULT_SEARCH_CAP):
    """General S with |S| = x and B with |B| = z passing the g4 hypotheses."""
    if x > (beta + 1) ** 2 or z > 10 * alpha:
        raise ParameterError(f"need x <= (beta+1)^2 and z <= 10*alpha, got x={x}, z={z}")
    lines_only = PositionRequirements((((1, 0), 1), ((0, 1), 1)))
    for _ in range(resample_cap):
        points = sample_points(x + z, field, rng, lines_only, resample_cap, search_cap)
        S, B = points[:x], points[x:]
        if check_g4_hypotheses(S, B, alpha, beta, field, search_cap).passed:
            return S, B
    raise GeneralPositionError()
