"""Command line entry point.

    fracheat <subcommand> --config <path> [--out <dir>] [--seed <u64>] [--paths <n>]

Exit status: 0 when everything ran and every check passed, 1 when a check
failed (or the numerics gave up), 2 for configuration errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import config as cfgmod
from . import heat_kernel as hk
from . import holder_estimator as he
from . import lemma_verifier as lv
from . import spde_solver as solver
from .artifacts import content_hash, read_csv, write_csv, write_json
from .errors import ConfigError, FracHeatError
from .noise_field import covariance_report, riesz_constant

log = logging.getLogger("fracheat")

MANIFEST = "manifest.json"
MANIFEST_VERSION = 1


def _write_manifest(out: Path, sub: str, rc: cfgmod.RunConfig, artifacts, status):
    write_json(out / MANIFEST, {
        "manifest_version": MANIFEST_VERSION,
        "package_version": __version__,
        "subcommand": sub,
        "config": rc.resolved,
        "config_hash": content_hash({"subcommand": sub, "config": rc.resolved}),
        "artifacts": sorted(artifacts),
        "status": status,
    })


# ---------------------------------------------------------------------------
# subcommands; each returns (artifact names, passed)


def run_kernel(rc, out: Path):
    ks = rc.kernel
    rows, summary = [], []
    ok = True
    for alpha in ks.alpha:
        for t in ks.t:
            q = hk.KernelQuery(alpha, t, tail_tol=ks.tail_tol, alias_tol=ks.alias_tol)
            table = hk.kernel_table(q)
            ratio = hk.kernel_bound_ratio(q, table)
            dp = hk.kernel_gradient_table(hk.KernelQuery(alpha, t, grid=table.grid)).values
            s = t ** (1 / alpha)
            keep = np.abs(table.abscissae) <= ks.y_max * s
            x, v = table.abscissae[keep], table.values[keep]
            rows.extend(zip([alpha] * x.size, [t] * x.size, x, v, dp[keep], ratio.ratio[keep]))
            mass = table.mass()
            rec = {"alpha": alpha, "t": t, "mass": mass, "grid": table.grid.to_dict(),
                   "n_negative": table.diagnostics["n_negative"],
                   "central_value_err": abs(table.values[table.grid.N // 2]
                                            / hk.kernel_central_value(alpha, t) - 1)}
            passed = abs(mass - 1) <= ks.mass_tol
            if alpha in (1.0, 2.0):
                exact = (np.exp(-x * x / (4 * t)) / np.sqrt(4 * np.pi * t) if alpha == 2
                         else t / (np.pi * (t * t + x * x)))
                err = float(np.max(np.abs(v / exact - 1)))
                rec["closed_form_max_rel_err"] = err
                passed = passed and err < ks.closed_form_tol
            rec["passed"] = passed
            ok = ok and passed
            summary.append(rec)
    write_csv(out / "kernel.csv", ["alpha", "t", "x", "p", "dp", "bound_ratio"], rows)
    write_json(out / "kernel_summary.json", summary)
    return ["kernel.csv", "kernel_summary.json"], ok


def run_noise(rc, out: Path):
    ns = rc.noise
    rep = covariance_report(ns.spec, ns.lags, ns.draws, ns.stream_id)
    rel = [e / t - 1 for e, t in zip(rep["estimate"], rep["target"])]
    rep["rel_err"] = rel
    rep["c_half"] = riesz_constant(0.5)
    rep["tolerance"] = ns.tolerance
    ok = all(abs(r) <= ns.tolerance for r in rel)
    rep["passed"] = ok
    write_csv(out / "noise_covariance.csv",
              ["lag", "estimate", "target", "stderr", "grid_covariance", "rel_err"],
              zip(rep["lags"], rep["estimate"], rep["target"], rep["stderr"],
                  rep["grid_covariance"], rel))
    write_json(out / "noise_summary.json", rep)
    return ["noise_covariance.csv", "noise_summary.json"], ok


def _simulate(rc):
    return solver.simulate_ensemble(rc.model, rc.solver, batch=rc.batch)


def _write_snapshots(rc, ens, out: Path):
    g = rc.solver.grid
    x = g.x()
    n = min(rc.export_paths, ens.fields.shape[0])
    rows = []
    for p in range(n):
        for i, t in enumerate(ens.times):
            rows.extend((ens.stream_ids[p], float(t), xv, val) for xv, val in zip(x, ens.fields[p, i]))
    write_csv(out / "snapshots.csv", ["stream_id", "t", "x", "value"], rows)
    stats = [(float(t), float(np.mean(ens.fields[:, i])), float(np.var(ens.fields[:, i])))
             for i, t in enumerate(ens.times)]
    write_csv(out / "ensemble_stats.csv", ["t", "mean", "variance"], stats)
    write_json(out / "simulate_summary.json",
               {"paths": len(ens.stream_ids), "times": ens.times, "diagnostics": ens.diagnostics})
    return ["snapshots.csv", "ensemble_stats.csv", "simulate_summary.json"]


def run_simulate(rc, out: Path):
    return _write_snapshots(rc, _simulate(rc), out), True


def run_estimate(rc, out: Path):
    est = rc.estimator
    ens = _simulate(rc)
    g = rc.solver.grid
    m = rc.model
    tables = []
    for k in est.k:
        tables.append(he.spatial_structure(ens.at(g.T), k, est.space_lags, g))
        tables.append(he.temporal_structure(ens, est.base_time, k, est.time_lags, est.burn_in))
    rows = [r for tab in tables for r in tab.rows()]
    write_csv(out / "moments.csv", ["axis", "k", "lag", "moment", "stderr"], rows)
    artifacts = ["moments.csv"]

    bounds = {}
    fits, reports = [], []
    for tab in tables:
        window = est.space_window if tab.axis == "space" else est.time_window
        fit = he.fit_exponent(tab, window)
        fits.append(fit)
        if tab.k >= 2:
            b = bounds.setdefault(tab.k, he.theorem_bounds(m.alpha, m.beta, m.rho, tab.k))
            reports.append(he.consistency_report(fit, b, tab.k))
    ok = all(r.passed for r in reports if r.applicable)

    by_k = {(t.axis, t.k): t for t in tables}
    props = {}
    if ("space", 2) in by_k and ("space", 4) in by_k:
        props["jensen_violations_space"] = he.jensen_violations(by_k["space", 2], by_k["space", 4])
        props["jensen_violations_time"] = he.jensen_violations(by_k["time", 2], by_k["time", 4])
    props["monotonicity_violations"] = {f"{t.axis}_k{t.k}": he.monotonicity_violations(t) for t in tables}

    oracle = None
    if m.sigma.additive and m.sigma.level != 0:
        so = solver.gaussian_oracle_structure(m, rc.solver, g.T, est.space_lags, law=est.oracle_law)
        to = solver.gaussian_oracle_temporal(m, rc.solver, est.base_time, est.time_lags, law=est.oracle_law)
        orows = []
        worst = 0.0
        for otab, key in ((so, ("space", 2)), (to, ("time", 2))):
            if key not in by_k:
                continue
            mc = by_k[key]
            for lag, o, v, s in zip(otab.lags, otab.moments, mc.moments, mc.stderrs):
                rel = v / o - 1
                worst = max(worst, abs(rel))
                orows.append((otab.axis, lag, o, v, s, rel))
        write_csv(out / "oracle.csv", ["axis", "lag", "oracle", "monte_carlo", "stderr", "rel_err"], orows)
        artifacts.append("oracle.csv")
        oracle = {"law": est.oracle_law, "max_rel_err": worst, "tolerance": est.oracle_tol,
                  "passed": worst <= est.oracle_tol,
                  "oracle_fits": [he.fit_exponent(so, est.space_window).to_record(),
                                  he.fit_exponent(to, est.time_window).to_record()]}
        ok = ok and oracle["passed"]

    write_json(out / "estimate_summary.json", {
        "fits": [f.to_record() for f in fits],
        "bounds": [b.to_record() for b in bounds.values()],
        "consistency": [r.to_record() for r in reports],
        "properties": props,
        "oracle": oracle,
        "space_lags": est.space_lags,
        "time_lags": est.time_lags,
        "base_time": est.base_time,
        "torus": ens.diagnostics,
        "passed": ok,
    })
    artifacts.append("estimate_summary.json")
    return artifacts, ok


def run_verify(rc, out: Path):
    reports = lv.run_all(rc.verify_checks, rc.verify_options)
    write_json(out / "checks.json", [r.to_record() for r in reports])
    table = lv.summary_table(reports)
    (out / "summary.txt").write_text(table + "\n")
    print(table)
    return ["checks.json", "summary.txt"], all(r.passed for r in reports)


def run_report(run_dirs, out: Path):
    """Merge finished runs; runs with the same manifest hash are kept once."""
    seen = {}
    for d in run_dirs:
        path = Path(d) / MANIFEST
        if not path.is_file():
            raise ConfigError("run_dirs", f"{d} has no {MANIFEST}")
        try:
            man = json.loads(path.read_text())
            h = man["config_hash"]
        except (ValueError, KeyError):
            raise ConfigError("run_dirs", f"{path} is not a valid manifest") from None
        seen.setdefault(h, (Path(d), man))
    runs, plot_rows = [], []
    for h, (d, man) in sorted(seen.items()):
        rec = {"config_hash": h, "subcommand": man["subcommand"], "status": man.get("status"),
               "dir": str(d)}
        for name in ("estimate_summary.json", "noise_summary.json", "kernel_summary.json",
                     "checks.json", "simulate_summary.json"):
            f = d / name
            if f.is_file():
                rec[name.removesuffix(".json")] = json.loads(f.read_text())
        moments = d / "moments.csv"
        if moments.is_file():
            for row in read_csv(moments):
                lag, mom = float(row["lag"]), float(row["moment"])
                if lag > 0 and mom > 0:
                    plot_rows.append((h[:12], row["axis"], row["k"], lag, np.log(lag), mom,
                                      np.log(mom), float(row["stderr"])))
        runs.append(rec)
    write_json(out / "report.json", {"runs": runs, "n_runs": len(runs),
                                     "n_duplicates": len(run_dirs) - len(runs)})
    write_csv(out / "plot.csv", ["run", "axis", "k", "lag", "log_lag", "moment", "log_moment", "stderr"],
              plot_rows)
    return ["report.json", "plot.csv"], True


RUNNERS = {"kernel": run_kernel, "noise": run_noise, "simulate": run_simulate,
           "estimate": run_estimate, "verify": run_verify}


def _u64(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def make_parser():
    p = argparse.ArgumentParser(prog="fracheat", description=__doc__.splitlines()[0])
    p.add_argument("subcommand", choices=cfgmod.SUBCOMMANDS)
    p.add_argument("run_dirs", nargs="*", help="run directories (report only)")
    p.add_argument("--config", help="JSON config or a previous manifest")
    p.add_argument("--out", help="output directory (default fracheat-out/<subcommand>)")
    p.add_argument("--seed", type=_u64, help="override seed_base")
    p.add_argument("--paths", type=_positive_int, help="override solver.path_count")
    p.add_argument("-q", "--quiet", action="store_true")
    p.add_argument("--version", action="version", version=f"fracheat {__version__}")
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = Path(args.out or Path("fracheat-out") / args.subcommand)
    try:
        if args.run_dirs and args.subcommand != "report":
            raise ConfigError("run_dirs", "positional run directories are only accepted by report")
        rc = cfgmod.load(args.config, args.seed, args.paths)
        out.mkdir(parents=True, exist_ok=True)
        if args.subcommand == "report":
            artifacts, ok = run_report(args.run_dirs, out)
        else:
            artifacts, ok = RUNNERS[args.subcommand](rc, out)
        _write_manifest(out, args.subcommand, rc, artifacts, "pass" if ok else "fail")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FracHeatError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if not args.quiet:
        print(f"{args.subcommand}: {'PASS' if ok else 'FAIL'} ({out})")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
