import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from slicebox import scenarios
from slicebox.cli import CSV_HEADER, main, read_csv
from slicebox.errors import ArgumentError


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def load_draws(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_HEADER
    return rows[1:]


def report_value(text, key):
    for line in text.splitlines():
        parts = line.split()
        if parts and parts[0] == key:
            return parts[1]
    raise KeyError(key)


def test_sample_gamma(tmp_path, capsys):
    out = tmp_path / "g.csv"
    code, _, err = run(
        ["sample", "--target", "gamma51", "--method", "positive", "--x0", "1",
         "--n", "100000", "--seed", "1", "--out", str(out)],
        capsys,
    )
    assert code == 0
    rows = load_draws(out)
    assert len(rows) == 100_000
    assert float(report_value(err, "mean")) == pytest.approx(5.0, abs=0.05)


def test_sample_expression(tmp_path, capsys):
    out = tmp_path / "b.csv"
    code, _, err = run(
        ["sample", "--target", "expr:exp(-(x-500)^2/10)", "--method", "unbounded",
         "--x0", "0", "--n", "10000", "--seed", "1", "--out", str(out)],
        capsys,
    )
    assert code == 0
    assert 499 <= float(report_value(err, "mean")) <= 501


def test_sample_to_stdout_json(capsys):
    code, out, _ = run(
        ["sample", "--target", "gmm", "--method", "stepout", "--n", "50", "--format", "json", "--seed", "2"],
        capsys,
    )
    assert code == 0
    doc = json.loads(out)
    assert len(doc["draws"]) == 50
    assert set(doc["draws"][0]) == {"t", "x", "n_evals", "n_shrinks"}
    assert doc["report"]["n"] == 50


@pytest.mark.parametrize(
    "argv",
    [
        ["sample", "--method", "bounded", "--target", "gamma51"],
        ["sample", "--method", "unbounded", "--target", "gmm", "--bounds", "0,1"],
        ["sample", "--method", "stepout", "--target", "gmm", "--a", "10"],
        ["sample", "--method", "unbounded", "--target", "gmm", "--width", "2"],
        ["sample", "--method", "unbounded", "--target", "nosuch"],
        ["sample", "--method", "unbounded", "--target", "expr:exp(-(x"],
        ["sample", "--method", "unbounded", "--target", "gmm", "--n", "0"],
        ["sample", "--method", "sideways", "--target", "gmm"],
    ],
)
def test_sample_usage_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert "usage" in err


def test_sample_state_error_exits_1(capsys):
    code, _, err = run(
        ["sample", "--target", "gamma51", "--method", "positive", "--x0", "-1", "--n", "10"], capsys
    )
    assert code == 1
    assert "x0" in err


def test_bounded_sampling(capsys):
    code, out, _ = run(
        ["sample", "--target", "expr:exp(-x^2/2)", "--method", "bounded", "--bounds=-6,6", "--n", "20"],
        capsys,
    )
    assert code == 0
    assert len(out.strip().splitlines()) == 21


def test_seed_env_fallback(tmp_path, capsys, monkeypatch):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["sample", "--target", "gmm", "--method", "unbounded", "--n", "200"]
    monkeypatch.setenv("SLICEBOX_SEED", "31")
    run(base + ["--out", str(a)], capsys)
    monkeypatch.delenv("SLICEBOX_SEED")
    run(base + ["--seed", "31", "--out", str(b)], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_identical_commands_identical_bytes(tmp_path, capsys):
    argv = ["sample", "--target", "quartic", "--method", "unbounded", "--n", "3000", "--seed", "5"]
    run(argv + ["--out", str(tmp_path / "1.csv")], capsys)
    run(argv + ["--out", str(tmp_path / "2.csv")], capsys)
    assert (tmp_path / "1.csv").read_bytes() == (tmp_path / "2.csv").read_bytes()


def test_sample_then_diagnose_round_trip(tmp_path, capsys):
    out = tmp_path / "r.csv"
    _, _, err = run(
        ["sample", "--target", "gauss500", "--method", "unbounded", "--x0", "0",
         "--n", "10000", "--seed", "1", "--out", str(out), "--format", "csv"],
        capsys,
    )
    code, diag, _ = run(["diagnose", "--in", str(out), "--reference", "gauss500"], capsys)
    assert code == 0
    assert report_value(diag, "ks_pass") == "true"
    for key in ("mean", "variance", "mean_shrinks"):
        assert report_value(diag, key) == report_value(err, key)


def test_round_trip_exact_values(tmp_path):
    from slicebox.diagnostics import summarize
    from slicebox.cli import write_csv
    from slicebox.samplers import SamplerConfig, run_chain
    from slicebox.targets import builtin

    records = run_chain(builtin("gmm"), SamplerConfig(seed=4), 1.0, 2000)
    path = tmp_path / "d.csv"
    with open(path, "w", newline="") as fh:
        write_csv(fh, records)
    with open(path, newline="") as fh:
        back = read_csv(fh)
    a, b = summarize(records), summarize(back)
    assert (a.mean, a.variance, a.mean_shrinks) == (b.mean, b.variance, b.mean_shrinks)


def test_diagnose_corrupt_file(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,x,n_evals,n_shrinks\n1,0.5,3,3\n2,0.7,4\n")
    code, _, err = run(["diagnose", "--in", str(bad)], capsys)
    assert code == 1
    assert "line 3" in err


def test_diagnose_bad_number(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,x,n_evals,n_shrinks\n1,0.5,3,3\n2,zz,4,4\n")
    code, _, err = run(["diagnose", "--in", str(bad)], capsys)
    assert code == 1 and "line 3" in err


def test_diagnose_zeros_fail_ks(tmp_path, capsys):
    zeros = tmp_path / "z.csv"
    with open(zeros, "w", newline="") as fh:
        fh.write("t,x,n_evals,n_shrinks\n")
        for t in range(1, 1001):
            fh.write(f"{t},0.0,1,1\n")
    code, out, _ = run(["diagnose", "--in", str(zeros), "--reference", "gauss500"], capsys)
    assert code == 1
    assert report_value(out, "ks_pass") == "false"


def test_read_csv_header():
    import io

    with pytest.raises(ArgumentError, match="line 1"):
        read_csv(io.StringIO("a,b,c,d\n1,2,3,4\n"))


def test_compare_fig4(capsys):
    code, out, _ = run(["compare", "--scenario", "fig4", "--seed", "3", "--format", "json"], capsys)
    assert code == 0
    reports = json.loads(out)["reports"]
    assert 0.17 <= reports["unbounded"]["mode_occupancy"] <= 0.23
    assert reports["stepout"]["mode_occupancy"] < 0.05


def test_compare_fig2c(capsys):
    code, out, _ = run(["compare", "--scenario", "fig2c", "--seed", "3", "--format", "json"], capsys)
    assert code == 0
    reports = json.loads(out)["reports"]
    assert 1500 <= reports["stepout"]["first_evals"] <= 2500
    # the paper-derived [6, 13] band for this number is checked (and recorded
    # as failing) in test_acceptance; here only the plumbing is checked
    assert reports["unbounded"]["mean_shrinks"] >= 1


def test_compare_text_table(capsys, tmp_path):
    code, out, _ = run(["compare", "--scenario", "fig3a", "--seed", "1", "--out-dir", str(tmp_path)], capsys)
    assert code == 0
    assert "mean_shrinks" in out.splitlines()[-2]
    assert len(load_draws(tmp_path / "fig3a_positive.csv")) == 10_000


def test_compare_unknown(capsys):
    code, _, err = run(["compare", "--scenario", "nosuch"], capsys)
    assert code == 2
    assert "fig4" in err


def test_compare_scenario_file(tmp_path, capsys):
    f = tmp_path / "mine.scn"
    f.write_text("# custom\ntarget = expr:exp(-x^2/2)\nmethods = unbounded, stepout\nn = 500\nthreshold = 1\n")
    code, out, _ = run(["compare", "--scenario-file", str(f), "--format", "json"], capsys)
    assert code == 0
    assert set(json.loads(out)["reports"]) == {"unbounded", "stepout"}


def test_shipped_scenarios_parse():
    assert scenarios.available() == ["fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig4"]
    for name in scenarios.available():
        spec = scenarios.load(name)
        assert spec.name == name


@pytest.mark.parametrize(
    "text",
    ["methods = unbounded\n", "target = gmm\nmethods = sideways\n", "target = gmm\nmethods = unbounded\nn = many\n",
     "target = gmm\nmethods = unbounded\ncolour = red\n", "target = gmm\nmethods = bounded\n"],
)
def test_bad_scenarios(text):
    with pytest.raises(ArgumentError):
        scenarios.parse_scenario(text)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "slicebox", "compare", "--scenario", "nosuch"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2
