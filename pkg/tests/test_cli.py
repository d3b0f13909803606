import json

import pytest

from wealthex import io
from wealthex.cli import main


def run(*argv):
    return main([str(a) for a in argv])


def test_iterate_uniform(tmp_path, capsys):
    out = tmp_path / "u"
    assert run("iterate", "--initial", "uniform:0,2", "--out", out) == 0
    assert sorted(p.name for p in out.iterdir()) == ["final.csv", "manifest.json", "trace.csv"]
    m = io.read_manifest(out / "manifest.json")
    assert m.status == "converged" and m.command == "iterate"
    assert m.fit.rate_mle == pytest.approx(1.0, abs=1e-4)
    assert "status=converged" in capsys.readouterr().out


def test_iterate_exp_one_step(tmp_path):
    assert run("iterate", "--initial", "exp", "--out", tmp_path / "e") == 0
    assert io.read_manifest(tmp_path / "e" / "manifest.json").extra["iterations"] == 1


def test_iterate_bad_grid_leaves_nothing(tmp_path, capsys):
    out = tmp_path / "bad"
    assert run("iterate", "--n", 4, "--out", out) == 1
    assert not out.exists()
    assert "n >= 16" in capsys.readouterr().err


def test_iterate_stall_exit_code(tmp_path):
    out = tmp_path / "s"
    assert run("iterate", "--initial", "uniform:0,2", "--max-iter", 3, "--out", out) == 2
    assert io.read_manifest(out / "manifest.json").status == "max_iter"
    assert len(io.read_trace(out / "trace.csv")) == 3


def test_iterate_custom_start(tmp_path):
    assert run("iterate", "--initial", "uniform:0,2", "--max-iter", 2, "--out", tmp_path / "a") == 2
    custom = f"custom:{tmp_path / 'a' / 'final.csv'}"
    assert run("iterate", "--initial", custom, "--out", tmp_path / "b") == 0


@pytest.mark.parametrize("initial", ["uniform:0,50", "gauss", "uniform:x"])
def test_iterate_bad_initial(tmp_path, initial):
    assert run("iterate", "--initial", initial, "--out", tmp_path / "x") == 1


def test_unknown_flag_is_usage_error(tmp_path):
    assert run("iterate", "--bogus", "--out", tmp_path) == 1
    assert run() == 1


def test_simulate_one_agent(tmp_path):
    assert run("simulate", "--agents", 1, "--out", tmp_path / "x") == 1
    assert not (tmp_path / "x").exists()


def test_simulate_reproducible(tmp_path):
    args = ["simulate", "--agents", 5000, "--sweeps", 50, "--seed", 7, "--n", 301, "--save-population"]
    assert run(*args, "--out", tmp_path / "a") == 0
    assert run(*args, "--out", tmp_path / "b") == 0
    for name in ("histogram.csv", "population.csv", "report.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    rep = json.loads((tmp_path / "a" / "report.json").read_text())
    assert rep["conserved"] and rep["total_initial"] == rep["total_final"] == 5000.0
    assert io.read_manifest(tmp_path / "a" / "manifest.json").seed == 7


def test_simulate_other_seed_differs(tmp_path):
    base = ["simulate", "--agents", 2000, "--sweeps", 20, "--n", 301]
    run(*base, "--seed", 1, "--out", tmp_path / "a")
    run(*base, "--seed", 2, "--out", tmp_path / "b")
    assert (tmp_path / "a" / "histogram.csv").read_bytes() != (tmp_path / "b" / "histogram.csv").read_bytes()


def test_compare_self(tmp_path, capsys):
    run("iterate", "--initial", "exp", "--out", tmp_path / "e")
    f = tmp_path / "e" / "final.csv"
    capsys.readouterr()
    assert run("compare", f, f) == 0
    lines = dict(line.split("=") for line in capsys.readouterr().out.split())
    assert float(lines["l1"]) == 0.0
    assert float(lines["kl_ab"]) == 0.0
    assert float(lines["a.rate_mle"]) == pytest.approx(1.0, abs=1e-4)


def test_compare_grid_mismatch(tmp_path):
    run("iterate", "--initial", "exp", "--out", tmp_path / "a")
    run("iterate", "--initial", "exp", "--n", 301, "--out", tmp_path / "b")
    assert run("compare", tmp_path / "a" / "final.csv", tmp_path / "b" / "final.csv") == 1


def test_compare_missing_file(tmp_path):
    assert run("compare", tmp_path / "nope.csv", tmp_path / "nope.csv") == 1


def test_probe(tmp_path, capsys):
    out = tmp_path / "p"
    assert run("probe", "--amplitude", 0.05, "--mode", "laguerre2", "--out", out) == 0
    rows = (out / "probe.csv").read_text().splitlines()
    assert rows[0] == "n,l1_fixed,ratio" and len(rows) == 12
    assert io.read_manifest(out / "manifest.json").status == "contracting"
    assert "contracting=True" in capsys.readouterr().out


def test_probe_linear_mode_errors(tmp_path):
    assert run("probe", "--mode", "linear", "--out", tmp_path / "p") == 1


def test_manifest_replay(tmp_path):
    assert run("iterate", "--initial", "uniform:0,2", "--n", 601, "--out", tmp_path / "a") == 0
    assert run("iterate", "--manifest", tmp_path / "a" / "manifest.json", "--out", tmp_path / "b") == 0
    assert (tmp_path / "a" / "final.csv").read_bytes() == (tmp_path / "b" / "final.csv").read_bytes()
    # the wrong command's manifest is refused
    assert run("probe", "--manifest", tmp_path / "a" / "manifest.json", "--out", tmp_path / "c") == 1


def test_module_entry_point():
    import subprocess
    import sys

    r = subprocess.run([sys.executable, "-m", "wealthex", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "iterate" in r.stdout
