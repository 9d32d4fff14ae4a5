from fractions import Fraction

import pytest

from quadricgon.curves import build_nodal_curve, sample_general_nodes
from quadricgon.errors import HypothesisError, ParameterError, PreconditionError
from quadricgon.gonality import (
    asymptotics,
    best_split,
    bounds_for,
    choose_route,
    d4_lower_sampler,
    d4_upper_witness,
    genus_cover,
    slope_ok,
)


def test_bounds_at_the_threshold():
    bounds = bounds_for(204, 0, 0)
    assert (bounds.d3_lower, bounds.d3_upper) == (403, 408)
    assert (bounds.d4_lower, bounds.d4_upper) == (597, 611)
    assert bounds.slope_ok
    assert bounds.genus == 41209
    assert "large regime" in bounds.provenance["d4_lower"]
    # The e4 route also applies and states 3a-14
    assert bounds.notes


def test_a_node_lowers_the_d4_upper_bound():
    assert bounds_for(204, 0, 1).d4_upper == 610


def test_e4_regime():
    bounds = bounds_for(20, 2, 8)
    assert bounds.d4_lower == 46
    assert bounds.d3_lower == 4
    assert bounds.d3_upper == 42
    assert bounds.d4_upper == 60
    assert "e4" in bounds.provenance["d4_lower"]


def test_split_regime():
    assert best_split(30, 100) == (6, 12, 61)
    bounds = bounds_for(30, 0, 100)
    assert bounds.d4_lower == 61
    assert "alpha=6" in bounds.provenance["d4_lower"]
    assert bounds.d3_lower == 4


def test_no_regime():
    with pytest.raises(HypothesisError) as info:
        bounds_for(10, 0, 0)
    assert "e4: a >= 18" in info.value.clauses


def test_bad_parameters():
    with pytest.raises(ParameterError):
        bounds_for(20, -1, 0)


@pytest.mark.parametrize("a, m, ok", [(43, 0, True), (42, 0, False), (47, 1, True), (46, 1, False)])
def test_slope_threshold(a, m, ok):
    assert slope_ok(a, m) is ok


def test_slope_threshold_closed_form():
    for m in range(0, 30):
        for a in range(m + 1, 400):
            assert slope_ok(a, m) == (a >= 4 * m + 43)


def test_genus_cover():
    assert genus_cover(40805).to_json() == {"g": 40805, "a": 204, "x": 404}
    assert genus_cover(41209).to_json() == {"g": 41209, "a": 204, "x": 0}
    with pytest.raises(ParameterError, match="below theorem range"):
        genus_cover(40804)


def test_genus_cover_range():
    for g in range(40805, 60000):
        cover = genus_cover(g)
        assert (cover.a - 1) ** 2 - cover.x == g
        assert 0 <= cover.x <= 2 * cover.a - 4


def test_asymptotic_intervals():
    rows = asymptotics(1000)
    assert rows[0].ratio_low == Fraction(597, 408)
    assert rows[0].ratio_high == Fraction(611, 403)
    for row in rows:
        assert row.ratio_low <= Fraction(3, 2) <= row.ratio_high
        assert row.stat_low <= Fraction(1, 12) <= row.stat_high
    assert rows[-1].ratio_high - rows[-1].ratio_low < rows[0].ratio_high - rows[0].ratio_low


def test_asymptotics_range():
    with pytest.raises(ParameterError):
        asymptotics(203)


def test_d4_upper_witness(field, rng):
    report = build_nodal_curve(4, 4, [], field, rng, scan_slices=50)
    assert d4_upper_witness(4, 0, report, field, rng) == 11
    S = sample_general_nodes(1, field, rng)
    report = build_nodal_curve(4, 4, S, field, rng, scan_slices=50)
    assert d4_upper_witness(4, 1, report, field, rng) == 10


def test_route_choice():
    assert choose_route(18, 0, 0, 39) == ("e4", None)
    assert choose_route(30, 0, 100, 60, route="g4") == ("g4", (6, 10))
    with pytest.raises(HypothesisError):
        choose_route(10, 0, 0, 5)


def test_sampler_rejects_large_z(field):
    with pytest.raises(PreconditionError):
        d4_lower_sampler(18, 0, 0, 40, field)


def test_sampler_small_run(field):
    report = d4_lower_sampler(18, 0, 0, 39, field, seed=3, trials=2)
    assert report.route == "e4"
    assert report.positive_h1 == 0
    assert report.disagreements == 0
    assert report.passed
    assert len(report.to_json()["rows"]) == 2


def test_sampler_is_reproducible(field):
    first = d4_lower_sampler(18, 0, 0, 20, field, seed=5, trials=2)
    again = d4_lower_sampler(18, 0, 0, 20, field, seed=5, trials=2, jobs=2)
    assert first.to_json() == again.to_json()


def test_sampler_covers_sets_above_the_search_cap(field):
    # 39 sampled points against a cap of 10
    report = d4_lower_sampler(18, 0, 0, 39, field, seed=1, trials=1, search_cap=10)
    assert report.passed


def largest_x(a, m):
    z = 3 * a - 15
    return min((a + 3 * m) // 3, m + 10 * ((a - 2) // 3) - z)


def test_largest_x_rows():
    assert [largest_x(a, m) for a in (18, 20, 24) for m in (0, 2)] == [6, 8, 6, 8, 8, 10]
    assert choose_route(24, 0, 8, 57) == ("e4", None)
    assert choose_route(24, 2, 10, 57) == ("e4", None)


@pytest.mark.slow
@pytest.mark.parametrize("a", [18, 20, 24])
@pytest.mark.parametrize("m", [0, 2])
@pytest.mark.parametrize("at_limit", [False, True])
def test_sampler_acceptance(field, a, m, at_limit):
    x = largest_x(a, m) if at_limit else 0
    report = d4_lower_sampler(a, m, x, 3 * a - 15, field, seed=0, trials=50, jobs=4)
    assert report.route == "e4"
    assert len(report.results) == 50
    assert report.positive_h1 == 0
    assert report.disagreements == 0
