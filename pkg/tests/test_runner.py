import json
import threading
import time
from fractions import Fraction

import numpy as np
import pytest

from quadricgon.errors import ParameterError, PreconditionError
from quadricgon.formats import csv_text, dumps, read_json, render
from quadricgon.runner import (
    INDEX_FILE,
    expand_grid,
    parallel_map,
    parse_param_spec,
    report_name,
    run_sweep,
    trial_rngs,
)


@pytest.mark.parametrize(
    "spec, parsed",
    [
        ("x=0:3", ("x", [0, 1, 2, 3])),
        ("x=1,4", ("x", [1, 4])),
        ("x=5", ("x", [5])),
        ("a-max=204:205", ("a_max", [204, 205])),
        ("route=e4,g4", ("route", ["e4", "g4"])),
    ],
)
def test_parse_param_spec(spec, parsed):
    assert parse_param_spec(spec) == parsed


@pytest.mark.parametrize("spec", ["x", "x=3:1", "x=a:b"])
def test_bad_param_spec(spec):
    with pytest.raises(ParameterError):
        parse_param_spec(spec)


def test_expand_grid_order():
    grid = expand_grid([("a", [1, 2]), ("x", [0, 1])])
    assert grid == [{"a": 1, "x": 0}, {"a": 1, "x": 1}, {"a": 2, "x": 0}, {"a": 2, "x": 1}]
    with pytest.raises(ParameterError):
        expand_grid([("a", [1]), ("a", [2])])


def test_parallel_map_keeps_input_order():
    def slow_square(n):
        time.sleep(0.01 * (5 - n))
        return n * n, threading.current_thread().name

    results = parallel_map(slow_square, range(5), jobs=4)
    assert [r[0] for r in results] == [0, 1, 4, 9, 16]


def test_trial_streams_are_stable():
    first = [rng.integers(0, 1000, size=3).tolist() for rng in trial_rngs(7, 3)]
    more = [rng.integers(0, 1000, size=3).tolist() for rng in trial_rngs(7, 5)]
    assert more[:3] == first
    assert first[0] != first[1]


def test_run_sweep_writes_and_reuses(tmp_path):
    calls = []

    def run_one(params):
        calls.append(params)
        if params["x"] == 2:
            raise PreconditionError("x too large")
        return 0, {"twice": 2 * params["x"]}

    grid = expand_grid([parse_param_spec("x=0:2")])
    index, worst = run_sweep("demo", grid, run_one, tmp_path, jobs=2)
    assert worst == 2
    assert [e["status"] for e in index["reports"]] == [0, 0, 2]
    stored = json.loads((tmp_path / report_name("demo", {"x": 1})).read_text())
    assert stored == {"params": {"x": 1}, "status": 0, "report": {"twice": 2}}
    assert json.loads((tmp_path / INDEX_FILE).read_text())["count"] == 3

    before = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    calls.clear()
    again, _ = run_sweep("demo", grid, run_one, tmp_path)
    assert calls == []
    assert again == index
    assert {p.name: p.read_bytes() for p in tmp_path.iterdir()} == before


def test_dumps_is_plain_json():
    text = dumps({"r": Fraction(3, 2), "n": np.int64(4), "ok": np.bool_(True), "t": (1, 2)})
    assert text.endswith("\n")
    assert json.loads(text) == {"r": "3/2", "n": 4, "ok": True, "t": [1, 2]}


def test_csv_rows():
    payload = {"rows": [{"a": 204, "g": 41209, "ratio_low": Fraction(597, 408), "ratio_high": Fraction(611, 403),
                         "stat_low": Fraction(1, 12), "stat_high": Fraction(1, 6)}]}
    lines = csv_text("asymptotics", payload).splitlines()
    assert lines[0] == "a,g,ratio_low,ratio_high,stat_low,stat_high"
    assert lines[1] == "204,41209,597/408,611/403,1/12,1/6"
    assert render("genus-cover", {"g": 1, "a": 2, "x": 3}, "csv").splitlines() == ["g,a,x", "1,2,3"]


def test_csv_unavailable():
    with pytest.raises(ParameterError):
        render("peel-e4", {}, "csv")


def test_read_json_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ParameterError):
        read_json(bad)
    with pytest.raises(ParameterError):
        read_json(tmp_path / "missing.json")
