"""
gonality.py - Bounds on d_3 and d_4 of the normalised nodal curves, and their checks.

Nothing here computes a gonality. `bounds_for()` evaluates the bounds that apply
to a parameter triple (a, m, x) and says which result produced each one. The
sampler exercises the cohomology vanishing those lower bounds rest on.

Regimes for the lower bound on d_4 (curves of type (a, a+m) with x nodes):
- large:  m = 0, a >= 204, x <= 2a-4             -> 3a-15 (takes precedence)
- e4:     a >= 18, 0 <= m < a, 3x <= a+3m        -> 3a-14
- split:  m = 0, a = 3*alpha+gamma, alpha >= 3, gamma >= 4, x <= (gamma-1)^2
                                                  -> min(10*alpha+1, 3a-14)
"""

import logging
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import isqrt

from .cohomology import ideal_cohomology
from .config import DEFAULT_SEARCH_CAP, DEFAULT_TRIALS
from .curves import find_curve_point, genus
from .errors import (
    CertificateInvariantError,
    DegenerateWitnessError,
    HypothesisError,
    ParameterError,
    PreconditionError,
)
from .horace import H1_ZERO, peel_e4, peel_g4, sample_e4_set, sample_g4_sets
from .quadric import PointScheme
from .runner import parallel_map, trial_rngs

logger = logging.getLogger(__name__)

MIN_COVER_GENUS = 40805
MIN_ASYMPTOTIC_A = 204


@dataclass(frozen=True)
class GonalityBounds:
    a: int
    m: int
    x: int
    d3_lower: int
    d3_upper: int
    d4_lower: int
    d4_upper: int
    genus: int
    provenance: dict
    notes: list = dc_field(default_factory=list)

    @property
    def slope_ok(self):
        return 4 * self.d3_upper < 3 * self.d4_lower

    def to_json(self):
        return {
            "a": self.a,
            "m": self.m,
            "x": self.x,
            "d3_lower": self.d3_lower,
            "d3_upper": self.d3_upper,
            "d4_lower": self.d4_lower,
            "d4_upper": self.d4_upper,
            "slope_ok": self.slope_ok,
            "genus": self.genus,
            "provenance": dict(self.provenance),
            "notes": list(self.notes),
        }


def slope_ok(a, m):
    """4(2a+m) < 3(3a-14): d_3 upper bound against the e4-route d_4 lower bound."""
    return 4 * (2 * a + m) < 3 * (3 * a - 14)


def large_regime(a, m, x):
    return m == 0 and a >= 204 and 0 <= x <= 2 * a - 4


def e4_regime_violations(a, m, x):
    clauses = []
    if a < 18:
        clauses.append("a >= 18")
    if not 0 <= m < a:
        clauses.append("0 <= m < a")
    if 3 * x > a + 3 * m:
        clauses.append("x <= a/3 + m")
    return clauses


def best_split(a, x):
    """(alpha, gamma, bound) maximising min(10*alpha+1, 3a-14) over valid splits, or None."""
    best = None
    for alpha in range(3, (a - 4) // 3 + 1):
        gamma = a - 3 * alpha
        if gamma < 4 or x > (gamma - 1) ** 2:
            continue
        bound = min(10 * alpha + 1, 3 * a - 14)
        if best is None or bound > best[2]:
            best = (alpha, gamma, bound)
    return best


def bounds_for(a, m, x):
    if a < 1 or m < 0 or x < 0:
        raise ParameterError("need a >= 1, m >= 0, x >= 0")
    provenance = {"d3_upper": "pullback of O(1,1)"}
    notes = []

    if m == 0 and a >= 24 and x <= 2 * a - 4:
        d3_lower = 2 * a - 5
        provenance["d3_lower"] = "d3 interpolation bound (m = 0, a >= 24, x <= 2a-4)"
    else:
        d3_lower = 4
        provenance["d3_lower"] = "trivial bound d_r >= r+1"

    e4_clauses = e4_regime_violations(a, m, x)
    split = best_split(a, x) if m == 0 else None
    if large_regime(a, m, x):
        d4_lower = 3 * a - 15
        provenance["d4_lower"] = "large regime (m = 0, a >= 204, x <= 2a-4)"
        if not e4_clauses:
            notes.append(f"e4 route states 3a-14 = {3 * a - 14}; the large regime states 3a-15, reported as stated")
    else:
        candidates = []
        if not e4_clauses:
            candidates.append((3 * a - 14, "e4 route (a >= 18, 0 <= m < a, x <= a/3 + m)"))
        if split is not None:
            alpha, gamma, bound = split
            candidates.append((bound, f"split route (alpha={alpha}, gamma={gamma})"))
        if not candidates:
            clauses = [f"e4: {c}" for c in e4_clauses]
            clauses.append("split: needs m = 0 and a = 3*alpha+gamma with alpha >= 3, gamma >= 4, x <= (gamma-1)^2")
            clauses.append("large: needs m = 0, a >= 204, x <= 2a-4")
            raise HypothesisError("no lower-bound regime applies", clauses)
        d4_lower, provenance["d4_lower"] = max(candidates, key=lambda c: c[0])

    if m == 0:
        d4_upper = 3 * a - 1 - min(1, x)
        provenance["d4_upper"] = "pullback of O(2,1) minus a node"
    else:
        d4_upper = 3 * a + m - 1 - min(1, x)
        provenance["d4_upper"] = "pullback of O(1,2) minus a node"
    d3_upper = 2 * a + m
    if d3_lower > d3_upper or d4_lower > d4_upper:
        raise CertificateInvariantError("lower bound exceeds upper bound")
    return GonalityBounds(a, m, x, d3_lower, d3_upper, d4_lower, d4_upper, genus(a, m, x), provenance, notes)


def d4_upper_witness(a, x, report, field, rng):
    """One point imposes one condition on |O(2,1)|: h^0(I_P(2,1)) = 5, so d_4 <= 3a-1-min(1,x)."""
    if report.b != a:
        raise PreconditionError("the d4 upper witness needs a curve of type (a,a)")
    if not report.passed:
        raise PreconditionError("the curve report is not certified")
    P = report.nodes[0] if x > 0 else find_curve_point(report.form, rng)
    if not report.form.contains(P):
        raise DegenerateWitnessError()
    if ideal_cohomology(PointScheme.reduced([P]), (2, 1), field).h0 != 5:
        raise DegenerateWitnessError()
    return 3 * a - 1 - min(1, x)


# --- sampling ----------------------------------------------------------------------


@dataclass(frozen=True)
class TrialResult:
    trial: int
    direct_h1: int
    conclusion: str

    @property
    def agree(self):
        # A certificate only claims something when it concludes h1 = 0
        return self.conclusion != H1_ZERO or self.direct_h1 == 0

    def to_json(self):
        return {"trial": self.trial, "direct_h1": self.direct_h1, "conclusion": self.conclusion, "agree": self.agree}


@dataclass(frozen=True)
class SamplingReport:
    a: int
    m: int
    x: int
    z: int
    route: str
    results: list

    @property
    def positive_h1(self):
        return sum(1 for r in self.results if r.direct_h1 > 0)

    @property
    def disagreements(self):
        return sum(1 for r in self.results if not r.agree)

    @property
    def inconclusive(self):
        return sum(1 for r in self.results if r.conclusion != H1_ZERO)

    @property
    def passed(self):
        return self.positive_h1 == 0 and self.disagreements == 0

    def to_json(self):
        return {
            "a": self.a,
            "m": self.m,
            "x": self.x,
            "z": self.z,
            "route": self.route,
            "trials": len(self.results),
            "positive_h1": self.positive_h1,
            "disagreements": self.disagreements,
            "inconclusive": self.inconclusive,
            "passed": self.passed,
            "rows": [r.to_json() for r in self.results],
        }


def choose_route(a, m, x, z, route="auto"):
    """Returns ("e4", None) or ("g4", (alpha, beta)) for the sampler."""
    e4_clauses = e4_regime_violations(a, m, x)
    if e4_clauses == [] and x + z > m + 10 * ((a - 2) // 3):
        e4_clauses.append("x + z <= v-u+10*alpha")
    if route in ("auto", "e4") and not e4_clauses:
        return "e4", None
    split = best_split(a, x) if m == 0 else None
    split_ok = split is not None and z <= 10 * split[0]
    if route in ("auto", "g4") and split_ok:
        alpha, gamma, _ = split
        return "g4", (alpha, gamma - 2)
    clauses = [f"e4: {c}" for c in e4_clauses] or ["e4 route not requested"]
    clauses.append("g4: needs m = 0 and a split a = 3*alpha+gamma with z <= 10*alpha")
    raise HypothesisError("no sampling route applies", clauses)


def d4_lower_sampler(a, m, x, z, field, seed=0, trials=DEFAULT_TRIALS, route="auto", jobs=1,
                     search_cap=DEFAULT_SEARCH_CAP):
    """
    For random S (|S| = x) and B (|B| = z) compare h^1(I_{S+B}(a-2, a+m-2)) with the
    peeling certificate. Every trial is expected to give h1 = 0.
    """
    if z < 0 or z > 3 * a - 15:
        raise PreconditionError(f"z must lie in 0..3a-15 = {3 * a - 15}, got {z}")
    chosen, split = choose_route(a, m, x, z, route)
    u, v = a - 2, a + m - 2
    # x+z is already bounded by the route's size limit
    search_cap = max(search_cap, x + z)

    def one_trial(args):
        k, rng = args
        if chosen == "e4":
            E = sample_e4_set(x + z, u, v, field, rng, search_cap=search_cap)
            cert = peel_e4(E, u, v, field, search_cap)
        else:
            alpha, beta = split
            S, B = sample_g4_sets(x, z, alpha, beta, field, rng, search_cap=search_cap)
            E = S + B
            cert = peel_g4(S, B, alpha, beta, field, search_cap)
        direct = ideal_cohomology(PointScheme.reduced(E), (u, v), field).h1
        logger.debug("trial %d: direct h1=%d, certificate %s", k, direct, cert.conclusion)
        return TrialResult(k, direct, cert.conclusion)

    results = parallel_map(one_trial, list(enumerate(trial_rngs(seed, trials))), jobs)
    report = SamplingReport(a, m, x, z, chosen, results)
    logger.info("sample-d4 a=%d m=%d x=%d z=%d: %d positive, %d disagreements, %d inconclusive",
                a, m, x, z, report.positive_h1, report.disagreements, report.inconclusive)
    return report


# --- genus cover and asymptotics ---------------------------------------------------


@dataclass(frozen=True)
class GenusCover:
    g: int
    a: int
    x: int

    def to_json(self):
        return {"g": self.g, "a": self.a, "x": self.x}


def genus_cover(g):
    """Smallest a with (a-1)^2 >= g and x = (a-1)^2 - g."""
    if g < MIN_COVER_GENUS:
        raise ParameterError(f"below theorem range: g = {g} < {MIN_COVER_GENUS}")
    root = isqrt(g)
    if root * root < g:
        root += 1
    a, x = root + 1, root * root - g
    if not (0 <= x <= 2 * a - 4 and a >= 204):
        raise CertificateInvariantError(f"cover ({a}, {x}) of g = {g} out of range")
    return GenusCover(g, a, x)


@dataclass(frozen=True)
class AsymptoticRow:
    a: int
    g: int
    ratio_low: Fraction
    ratio_high: Fraction
    stat_low: Fraction
    stat_high: Fraction

    def to_json(self):
        return dict(self.__dict__)


def asymptotic_row(a):
    # m = 0, x = 0: d3 in [2a-5, 2a], d4 in [3a-15, 3a-1], sqrt(g) = a-1
    return AsymptoticRow(
        a,
        (a - 1) ** 2,
        Fraction(3 * a - 15, 2 * a),
        Fraction(3 * a - 1, 2 * a - 5),
        Fraction(a - 45, 12 * (a - 1)),
        Fraction(a + 17, 12 * (a - 1)),
    )


def asymptotics(a_max, a_min=MIN_ASYMPTOTIC_A):
    if a_max < MIN_ASYMPTOTIC_A or a_min < MIN_ASYMPTOTIC_A:
        raise ParameterError(f"asymptotics needs a >= {MIN_ASYMPTOTIC_A}")
    return [asymptotic_row(a) for a in range(a_min, a_max + 1)]
