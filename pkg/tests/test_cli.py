import csv
import io
import json

import pytest

from eventoverlap import cli, closed_form, validation
from eventoverlap.closed_form import ProbabilityResult


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


SCEN = ["--T", "120", "--ta", "3", "--tb", "1", "--na", "5", "--nb", "10"]


def test_compute_universal_json():
    code, text = run("compute", *SCEN, "--method", "universal", "--format", "json")
    assert code == 0
    rec = json.loads(text)
    assert rec["probability"] == pytest.approx(0.8546, abs=1e-4)
    assert rec["error_bound"] == pytest.approx(0.0177, abs=5e-4)
    assert list(rec) == [
        "T", "ta", "tb", "na", "nb", "swapped", "method", "probability",
        "raw_probability", "error_bound", "guard", "clamped",
    ]


def test_compute_precise_and_rejection():
    code, text = run("compute", "--T", "3", "--ta", "1", "--tb", "1", "--na", "1", "--nb", "1", "--method", "precise")
    assert code == 0 and json.loads(text)["probability"] == pytest.approx(0.5556, abs=1e-4)
    code, text = run("compute", *SCEN, "--method", "precise")
    assert code == 2 and text == ""


def test_compute_guard_flag():
    code, text = run("compute", "--T", "10", "--ta", "3", "--tb", "1", "--na", "4", "--nb", "1", "--method", "universal")
    rec = json.loads(text)
    assert code == 0 and rec["probability"] == 1.0 and rec["guard"] == "CERTAIN_OVERLAP"


def test_compute_swapped_echo():
    code, text = run("compute", "--T", "60", "--ta", "2", "--tb", "5", "--na", "1", "--nb", "1")
    assert json.loads(text)["swapped"] is True


def test_compute_all_methods_csv():
    code, text = run("compute", "--T", "3", "--ta", "1", "--tb", "1", "--na", "1", "--nb", "1",
                     "--method", "all", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [r["method"] for r in rows] == ["precise", "approx", "universal"]
    assert float(rows[0]["probability"]) == 5 / 9
    code, text = run("compute", *SCEN, "--method", "all")
    assert [r["method"] for r in json.loads(text)] == ["approx", "universal"]


def test_compute_plain():
    code, text = run("compute", *SCEN, "--format", "plain")
    assert code == 0 and "probability" in text and "0.854629" in text


def test_compute_rates():
    code, text = run("compute", "--T", "120", "--ta", "3", "--tb", "1",
                     "--rate-a", str(5 / 120), "--rate-b", str(10 / 120))
    rec = json.loads(text)
    assert rec["method"] == "rate" and rec["probability"] == pytest.approx(0.8546293, rel=1e-7)
    assert "rate_a" in rec and "na" not in rec


@pytest.mark.parametrize(
    "argv",
    [
        ["compute", "--T", "120", "--ta", "3"],
        ["compute", *SCEN, "--rate-a", "0.1"],
        ["compute", *SCEN, "--method", "rate"],
        ["compute", "--T", "-1", "--ta", "3", "--tb", "1", "--na", "1", "--nb", "1"],
        ["compute", *SCEN, "--method", "bogus"],
        ["compute", "--T", "10", "--ta", "3", "--tb", "1", "--na", "1.5", "--nb", "1"],
        ["simulate", *SCEN, "--trials", "0", "--seed", "1"],
        ["simulate", *SCEN, "--trials", "100"],
        ["validate", "--grid", "bogus", "--seed", "1"],
        ["sweep", *SCEN, "--sweep", "na", "--from", "1", "--to", "2", "--steps", "3"],
    ],
)
def test_bad_input_exits_2(argv, capsys):
    code, _ = run(*argv)
    assert code == 2


def test_simulate_deterministic():
    argv = ["simulate", "--T", "3", "--ta", "1", "--tb", "1", "--na", "1", "--nb", "1",
            "--trials", "1000000", "--seed", "42"]
    code, first = run(*argv)
    assert code == 0
    rec = json.loads(first)
    assert rec["ci_low"] <= 5 / 9 <= rec["ci_high"]
    assert run(*argv)[1] == first
    assert run(*argv, "--workers", "4")[1] == first


def test_sweep_error_bound_vanishes_at_equal_durations():
    code, text = run("sweep", "--T", "120", "--ta", "3", "--na", "5", "--nb", "10",
                     "--sweep", "tb", "--from", "1", "--to", "3", "--steps", "9")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["tb", "probability", "error_bound"]
    bounds = [float(r[2]) for r in rows[1:]]
    assert len(bounds) == 9
    # overall decay; a small bump appears where tau switches from t_a*n_a to t_b*n_b
    assert bounds[0] == max(bounds)
    assert bounds[-1] == 0.0
    assert all(b < a for a, b in zip(bounds[4:], bounds[5:]))


def test_sweep_T_nonincreasing_and_round_trip():
    code, text = run("sweep", "--ta", "3", "--tb", "1", "--na", "5", "--nb", "10",
                     "--sweep", "T", "--from", "60", "--to", "600", "--steps", "25")
    rows = list(csv.reader(io.StringIO(text)))[1:]
    probs = [float(r[1]) for r in rows]
    assert all(b <= a for a, b in zip(probs, probs[1:]))
    for r in rows:
        T = float(r[0])
        exact = closed_form.p_universal(cli.Scenario.from_params(T, 3, 1, 5, 10)).value
        assert float(r[1]) == exact  # bit-exact


def test_sweep_single_step_matches_compute():
    code, text = run("sweep", "--T", "120", "--ta", "3", "--tb", "1", "--nb", "10",
                     "--sweep", "na", "--from", "5", "--to", "9", "--steps", "1")
    rows = list(csv.reader(io.StringIO(text)))
    assert len(rows) == 2 and rows[1][0] == "5"
    rec = json.loads(run("compute", *SCEN)[1])
    assert float(rows[1][1]) == rec["probability"]
    assert float(rows[1][2]) == rec["error_bound"]


def test_sweep_counts():
    code, text = run("sweep", "--T", "120", "--ta", "3", "--tb", "1", "--nb", "10",
                     "--sweep", "na", "--from", "1", "--to", "6", "--steps", "6")
    rows = list(csv.reader(io.StringIO(text)))[1:]
    assert [r[0] for r in rows] == ["1", "2", "3", "4", "5", "6"]


def test_config_file_defaults(tmp_path):
    cfg = tmp_path / "scenario.cfg"
    cfg.write_text("# Example I core\nT = 120\nta = 3\ntb = 1\nna = 5\nnb = 10\nformat = csv\n")
    code, text = run("compute", "--config", str(cfg), "--format", "json")
    assert code == 0 and json.loads(text)["probability"] == pytest.approx(0.8546, abs=1e-4)
    code, text = run("compute", "--config", str(cfg), "--nb", "1")
    assert code == 0 and text.startswith("T,ta")
    cfg.write_text("T = 120\nbogus = 1\n")
    assert run("compute", "--config", str(cfg))[0] == 2
    cfg.write_text("T 120\n")
    assert run("compute", "--config", str(cfg))[0] == 2


def test_internal_error_exit_3(monkeypatch):
    def boom(s):
        raise RuntimeError("boom")

    monkeypatch.setitem(cli._COUNT_METHODS, "universal", boom)
    assert run("compute", *SCEN)[0] == 3


def test_json_schema_stable():
    a = json.loads(run("compute", *SCEN)[1])
    b = json.loads(run("compute", "--T", "10", "--ta", "3", "--tb", "1", "--na", "4", "--nb", "1")[1])
    assert list(a) == list(b)


def test_validate_small_passes():
    code, text = run("validate", "--grid", "small", "--trials", "200000", "--seed", "7")
    report = json.loads(text)
    assert code == 0 and report["passed"]
    names = [c["name"] for c in report["checks"]]
    assert "oracle_equivalence" in names and "convergence[p_star]" in names
    assert any(n.startswith("mc_vs_universal") for n in names)


def test_validate_detects_corrupted_formula(monkeypatch):
    real = closed_form.p_universal

    def corrupted(s, scale="overlap"):
        r = real(s, scale)
        return ProbabilityResult(value=r.value * 0.9, raw_value=r.raw_value * 0.9, method=r.method,
                                 error_bound=r.error_bound)

    monkeypatch.setattr(validation.closed_form, "p_universal", corrupted)
    code, text = run("validate", "--grid", "small", "--trials", "50000", "--seed", "7")
    report = json.loads(text)
    assert code == 1 and not report["passed"]
    failed = [c["name"] for c in report["checks"] if not c["passed"]]
    assert any(n.startswith("mc_vs_universal") for n in failed)
    assert any(n.startswith("published_example[universal") for n in failed)
