import json
import shutil
import subprocess
import sys

import pytest

from fracheat.cli import main

SMALL = {
    "seed_base": 7,
    "model": {"alpha": 2.0, "beta": 0.5},
    "solver": {"L": 16.0, "N": 512, "dt": 0.002, "T": 0.2, "path_count": 40},
    "estimator": {"time_window": [0.01, 0.05], "base_time": 0.1, "oracle_tol": 0.5},
    "noise": {"N": 128, "L": 16.0, "draws": 500, "tolerance": 0.2},
    "kernel": {"alpha": [1.5, 2.0], "alias_tol": 1e-8, "tail_tol": 1e-10},
    "verify": {
        "checks": ["kernel_bounds", "space_modulus", "time_modulus", "smoothing", "riesz_sup",
                   "gamma_identity", "log_inequality"],
        "options": {
            "kernel_bounds": {"alpha_list": [1.5, 2.0], "t_list": [0.1, 1.0], "y_max": 6.0},
            "space_modulus": {"alpha_list": [2.0], "t_list": [1.0]},
            "time_modulus": {"alpha_list": [2.0], "t_list": [1.0]},
            "smoothing": {"rho_list": [0.5], "n_base": 5},
            "riesz_sup": {"alpha": [1.5], "beta_list": [0.5]},
            "gamma_identity": {"alpha_grid": [2.0], "beta_grid": [0.5], "t_grid": [1.0]},
        },
    },
}


def write_config(path, cfg=None, **changes):
    cfg = json.loads(json.dumps(cfg or SMALL))
    for dotted, value in changes.items():
        *head, last = dotted.split("__")
        d = cfg
        for h in head:
            d = d.setdefault(h, {})
        d[last] = value
    path.write_text(json.dumps(cfg))
    return str(path)


@pytest.fixture
def cfg(tmp_path):
    return write_config(tmp_path / "small.json")


def run(*args):
    return main(["-q", *map(str, args)])


def files(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


@pytest.mark.parametrize("sub,expected", [
    ("kernel", {"kernel.csv", "kernel_summary.json"}),
    ("noise", {"noise_covariance.csv", "noise_summary.json"}),
    ("simulate", {"snapshots.csv", "ensemble_stats.csv", "simulate_summary.json"}),
    ("estimate", {"moments.csv", "oracle.csv", "estimate_summary.json"}),
])
def test_subcommands_write_artifacts(tmp_path, cfg, sub, expected):
    out = tmp_path / sub
    assert run(sub, "--config", cfg, "--out", out) == 0
    names = set(files(out))
    assert expected | {"manifest.json"} == names
    man = json.loads((out / "manifest.json").read_text())
    assert man["status"] == "pass" and man["subcommand"] == sub
    assert sorted(expected) == man["artifacts"]


def test_verify_prints_table(tmp_path, cfg, capsys):
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "v")]) == 0
    out = capsys.readouterr().out
    assert sum(line.rstrip().endswith("PASS") for line in out.splitlines()) >= 7
    checks = json.loads((tmp_path / "v" / "checks.json").read_text())
    assert len(checks) == 7 and all(c["passed"] for c in checks)


def test_failed_check_exits_one(tmp_path):
    cfg = write_config(tmp_path / "c.json", verify__checks=["smoothing"],
                       verify__options={"smoothing": {"alpha": 1.2, "rho_list": [1.0], "n_base": 5}})
    assert run("verify", "--config", cfg, "--out", tmp_path / "v") == 1
    man = json.loads((tmp_path / "v" / "manifest.json").read_text())
    assert man["status"] == "fail"


@pytest.mark.parametrize("change", [
    {"model__beta": 1.5}, {"model__alpha": 2.5}, {"solver__N": 100}, {"solver__bogus": 1},
    {"estimator__k": []}, {"solver__zero_mode": "keep"},
])
def test_config_errors_exit_two(tmp_path, change, capsys):
    cfg = write_config(tmp_path / "bad.json", **change)
    assert run("simulate", "--config", cfg, "--out", tmp_path / "o") == 2
    err = capsys.readouterr().err
    assert "config error" in err
    field = list(change)[0].split("__")[-1]
    assert field in err


def test_malformed_json_exit_two(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"model": {"alpha": 1.5,}}')
    assert run("kernel", "--config", p, "--out", tmp_path / "o") == 2
    assert "line 1" in capsys.readouterr().err


def test_bad_arguments_exit_two(tmp_path, cfg):
    assert run("simulate", "--config", cfg, "--seed", "-1") == 2
    assert run("simulate", "--config", cfg, "--paths", "0") == 2
    assert run("launch", "--config", cfg) == 2
    assert run("simulate", "--config", tmp_path / "missing.json") == 2
    assert run("simulate", tmp_path, "--config", cfg) == 2


def test_report_merges_and_deduplicates(tmp_path, cfg):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("estimate", "--config", cfg, "--out", a) == 0
    shutil.copytree(a, b)
    assert run("noise", "--config", cfg, "--out", tmp_path / "n") == 0
    assert run("report", a, b, tmp_path / "n", "--out", tmp_path / "r") == 0
    rep = json.loads((tmp_path / "r" / "report.json").read_text())
    assert rep["n_runs"] == 2 and rep["n_duplicates"] == 1
    plot = (tmp_path / "r" / "plot.csv").read_text().splitlines()
    assert plot[0].startswith("run,axis,k,lag") and len(plot) > 10


def test_report_edge_cases(tmp_path):
    assert run("report", "--out", tmp_path / "empty") == 0
    rep = json.loads((tmp_path / "empty" / "report.json").read_text())
    assert rep["n_runs"] == 0
    (tmp_path / "nomanifest").mkdir()
    assert run("report", tmp_path / "nomanifest", "--out", tmp_path / "r") == 2


def test_reruns_are_byte_identical(tmp_path, cfg):
    assert run("simulate", "--config", cfg, "--out", tmp_path / "a") == 0
    par = write_config(tmp_path / "par.json", solver__workers=3, solver__batch=7)
    assert run("simulate", "--config", par, "--out", tmp_path / "b") == 0
    fa, fb = files(tmp_path / "a"), files(tmp_path / "b")
    for name in ("snapshots.csv", "ensemble_stats.csv"):
        assert fa[name] == fb[name]
    # rerun from the manifest reproduces everything, manifest included
    assert run("simulate", "--config", tmp_path / "a" / "manifest.json", "--out", tmp_path / "c") == 0
    assert files(tmp_path / "c") == fa


def test_seed_and_paths_overrides(tmp_path, cfg):
    assert run("simulate", "--config", cfg, "--out", tmp_path / "a") == 0
    assert run("simulate", "--config", cfg, "--out", tmp_path / "b", "--seed", "8", "--paths", "5") == 0
    man = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert man["config"]["seed_base"] == 8 and man["config"]["solver"]["path_count"] == 5
    assert files(tmp_path / "a")["snapshots.csv"] != files(tmp_path / "b")["snapshots.csv"]


def test_console_script(tmp_path, cfg):
    exe = shutil.which("fracheat")
    cmd = [exe] if exe else [sys.executable, "-m", "fracheat.cli"]
    res = subprocess.run(cmd + ["kernel", "--config", cfg, "--out", str(tmp_path / "k")],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert "kernel: PASS" in res.stdout
    res = subprocess.run(cmd + ["kernel", "--config", cfg, "--seed", "abc"], capture_output=True, text=True)
    assert res.returncode == 2


def test_kernel_csv_columns(tmp_path, cfg):
    assert run("kernel", "--config", cfg, "--out", tmp_path / "k") == 0
    lines = (tmp_path / "k" / "kernel.csv").read_text().splitlines()
    assert lines[0] == "alpha,t,x,p,dp,bound_ratio"
    # the kernel is even and its derivative odd
    rows = [list(map(float, l.split(","))) for l in lines[1:] if l.startswith("2.0,")]
    by_x = {r[2]: r for r in rows}
    for x, r in by_x.items():
        if -x in by_x and x > 0:
            assert r[3] == by_x[-x][3] and r[4] == -by_x[-x][4]
