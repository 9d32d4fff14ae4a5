import json
from types import SimpleNamespace

import pytest

from quadricgon.horace import H1_ZERO, INCONCLUSIVE
from quadricgon.main import _certificate_payload, build_parser, config_from_args, dispatch, main


def run_cli(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def test_bounds(capsys):
    status, out, _ = run_cli(capsys, "bounds", "--a", "204", "--m", "0", "--x", "0")
    assert status == 0
    data = json.loads(out)
    assert (data["d3_lower"], data["d3_upper"], data["d4_lower"], data["d4_upper"]) == (403, 408, 597, 611)
    assert data["slope_ok"] is True


def test_genus_cover(capsys):
    status, out, _ = run_cli(capsys, "genus-cover", "--g", "40805")
    assert status == 0
    assert json.loads(out) == {"g": 40805, "a": 204, "x": 404}


def test_hilbert(capsys):
    status, out, _ = run_cli(capsys, "hilbert", "--a", "4", "--b", "4", "--fat", "3", "--seed", "7")
    assert status == 0
    data = json.loads(out)
    assert (data["h0"], data["h1"], data["deg"]) == (16, 0, 9)


def test_same_seed_same_bytes(capsys):
    argv = ("member", "--a", "2", "--b", "2", "--fat", "1", "--seed", "7")
    _, first, _ = run_cli(capsys, *argv)
    _, again, _ = run_cli(capsys, *argv)
    assert first == again
    assert json.loads(first)["p"] == 65537


def test_rational_field_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("QUADRICGON_PRIME", "rational")
    status, out, _ = run_cli(capsys, "hilbert", "--a", "4", "--b", "4", "--fat", "1")
    assert status == 0
    data = json.loads(out)
    assert data["h0"] == 22
    assert data["p"] is None


@pytest.mark.parametrize(
    "argv",
    [
        ("genus-cover", "--g", "40804"),
        ("bounds", "--a", "204"),
        ("bounds", "--a", "204", "--m", "0", "--x", "0", "--prime", "10"),
        ("check-cert",),
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    status, out, err = run_cli(capsys, *argv)
    assert status == 2
    assert out == ""
    assert err.startswith("error:")


def test_missing_command():
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2


def test_peel_then_check(capsys, tmp_path):
    cert_path = tmp_path / "cert.json"
    status, out, _ = run_cli(capsys, "peel-e4", "--u", "9", "--v", "9", "--z", "10", "--output", str(cert_path))
    assert status == 0
    assert out == ""
    data = json.loads(cert_path.read_text())
    assert data["conclusion"] == "h1=0"
    assert data["direct_h1"] == 0
    status, out, _ = run_cli(capsys, "check-cert", "--input", str(cert_path))
    assert status == 0
    assert json.loads(out)["passed"] is True


def stub_certificate(conclusion):
    return SimpleNamespace(conclusion=conclusion, to_json=lambda: {"conclusion": conclusion})


@pytest.mark.parametrize(
    "conclusion, direct_h1, status, agree",
    [
        (H1_ZERO, 0, 0, True),
        (INCONCLUSIVE, 0, 0, True),
        (INCONCLUSIVE, 2, 1, True),
        (H1_ZERO, 1, 1, False),
    ],
)
def test_certificate_status_follows_the_direct_rank(conclusion, direct_h1, status, agree):
    got, payload = _certificate_payload(stub_certificate(conclusion), direct_h1)
    assert got == status
    assert payload == {"conclusion": conclusion, "direct_h1": direct_h1, "agree": agree}


def test_curve_with_witness(capsys):
    status, out, _ = run_cli(capsys, "curve", "--a", "4", "--b", "4", "--x", "1", "--scan-slices", "20",
                             "--d4-witness")
    assert status == 0
    data = json.loads(out)
    assert data["genus"] == 8
    assert data["d4_upper_witness"] == 10
    assert data["replay_problems"] == []


def test_position_report(capsys):
    status, out, _ = run_cli(capsys, "position", "--x", "6", "--seed", "3")
    assert status == 0
    data = json.loads(out)
    assert data["max_on_line_first"] == 1
    assert data["max_on_21"] == 5


def test_asymptotics_csv(capsys):
    status, out, _ = run_cli(capsys, "asymptotics", "--a-max", "205", "--format", "csv")
    assert status == 0
    lines = out.splitlines()
    assert lines[0] == "a,g,ratio_low,ratio_high,stat_low,stat_high"
    assert len(lines) == 3


def test_sweep(capsys, tmp_path):
    status, out, _ = run_cli(capsys, "sweep", "--target", "genus-cover", "--param", "g=40804:40806",
                             "--output", str(tmp_path))
    assert status == 2
    index = json.loads(out)
    assert [e["status"] for e in index["reports"]] == [2, 0, 0]
    assert (tmp_path / "genus-cover__g=40805.json").exists()


def test_dispatch_returns_payload():
    ns = build_parser().parse_args(["bounds", "--a", "30", "--m", "0", "--x", "100"])
    status, payload = dispatch(config_from_args(ns))
    assert status == 0
    assert payload["d4_lower"] == 61
