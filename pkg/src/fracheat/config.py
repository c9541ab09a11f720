"""Run configuration: JSON in, validated settings out.

Every section is optional; missing keys take the documented defaults and the
fully resolved dictionary is what gets written to the manifest, so a
manifest can be fed back as a config.  Problems raise ConfigError naming the
dotted field.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, FracHeatError
from .grid import GridSpec
from .holder_estimator import log_lags
from .noise_field import DEFAULT_SEED, NoiseSpec, compensated_zero_mode
from .spde_solver import InitialCondition, ModelSpec, Sigma, SolverConfig

SUBCOMMANDS = ("kernel", "noise", "simulate", "estimate", "verify", "report")
U64_MAX = (1 << 64) - 1

DEFAULTS = {
    "seed_base": DEFAULT_SEED,
    "model": {
        "alpha": 1.5,
        "beta": 0.5,
        "rho": 1.0,
        "K": None,
        "sigma": {"kind": "constant", "value": 1.0, "a": 1.0, "b": 0.0},
        "phi": {"kind": "constant", "value": 0.0, "amplitude": 1.0, "mode": 1, "rho": 0.5,
                "phases": None},
    },
    "solver": {
        "L": 32.0,
        "N": 1024,
        "dt": 1e-3,
        "T": 0.5,
        "path_count": 1000,
        "zero_mode": "drop",
        "dealias": False,
        "workers": 1,
        "batch": 256,
        "strict_torus": False,
        "export_paths": 2,
    },
    "estimator": {
        "k": [2, 4],
        "space_window": None,
        "space_lag_count": 10,
        "time_window": None,
        "time_lag_count": 10,
        "base_time": None,
        "burn_in": None,
        "oracle_law": "scheme",
        "oracle_tol": 0.05,
    },
    "kernel": {
        "alpha": [1.0, 1.5, 2.0],
        "t": [1.0],
        "y_max": 8.0,
        "alias_tol": 1e-10,
        "tail_tol": 1e-12,
        "mass_tol": 1e-6,
        "closed_form_tol": 1e-8,
    },
    "noise": {
        "beta": 0.5,
        "L": 32.0,
        "N": 1024,
        "dt": 0.01,
        "draws": 10000,
        "lags": [0.25, 0.5, 1.0, 2.0],
        "zero_mode": "compensated",
        "stream_id": 0,
        "tolerance": 0.05,
    },
    "verify": {"checks": None, "options": {}},
}


def _merge(defaults, given, path):
    if not isinstance(given, dict):
        raise ConfigError(path or "<root>", f"expected an object, got {type(given).__name__}")
    out = copy.deepcopy(defaults)
    for key, val in given.items():
        field = f"{path}.{key}" if path else key
        if key not in defaults:
            raise ConfigError(field, "unknown key")
        if isinstance(defaults[key], dict) and key not in ("options",):
            out[key] = _merge(defaults[key], val, field)
        else:
            out[key] = val
    return out


def _num(cfg, field, lo=None, hi=None, lo_open=False, hi_open=False, integer=False, allow_none=False):
    section, _, key = field.rpartition(".")
    d = cfg
    for part in section.split(".") if section else []:
        d = d[part]
    v = d[key]
    if v is None and allow_none:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(field, f"expected a number, got {v!r}")
    if integer and (not float(v).is_integer()):
        raise ConfigError(field, f"expected an integer, got {v!r}")
    if not math.isfinite(v):
        raise ConfigError(field, f"must be finite, got {v!r}")
    if lo is not None and (v < lo or (lo_open and v == lo)):
        raise ConfigError(field, f"must be {'>' if lo_open else '>='} {lo}, got {v}")
    if hi is not None and (v > hi or (hi_open and v == hi)):
        raise ConfigError(field, f"must be {'<' if hi_open else '<='} {hi}, got {v}")
    return int(v) if integer else float(v)


def _bool(cfg, section, key):
    v = cfg[section][key]
    if not isinstance(v, bool):
        raise ConfigError(f"{section}.{key}", f"expected true or false, got {v!r}")
    return v


def _num_list(cfg, field, lo=None, lo_open=False, allow_empty=False):
    section, key = field.split(".")
    v = cfg[section][key]
    if not isinstance(v, list) or (not v and not allow_empty):
        raise ConfigError(field, f"expected a non-empty list of numbers, got {v!r}")
    out = []
    for i, item in enumerate(v):
        sub = {section: {key: item}}
        out.append(_num(sub, field, lo=lo, lo_open=lo_open))
    return out


def _window(cfg, field):
    section, key = field.split(".")
    v = cfg[section][key]
    if v is None:
        return None
    if not (isinstance(v, list) and len(v) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)
            and 0 < v[0] < v[1]):
        raise ConfigError(field, f"expected [lo, hi] with 0 < lo < hi, got {v!r}")
    return (float(v[0]), float(v[1]))


def _power_of_two(cfg, field):
    n = _num(cfg, field, lo=8, integer=True)
    if n & (n - 1):
        raise ConfigError(field, f"must be a power of two, got {n}")
    return n


def _zero_mode(cfg, field):
    section, key = field.split(".")
    v = cfg[section][key]
    if v in ("drop", "compensated"):
        return v
    if isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v) and v >= 0:
        return float(v)
    raise ConfigError(field, f"expected 'drop', 'compensated' or a nonnegative number, got {v!r}")


def _resolve_zero_mode(rule, beta, L):
    return compensated_zero_mode(beta, L) if rule == "compensated" else rule


@dataclass
class EstimatorSettings:
    k: tuple
    space_lags: tuple
    space_window: tuple
    time_lags: tuple
    time_window: tuple
    base_time: float
    burn_in: float
    oracle_law: str
    oracle_tol: float


@dataclass
class KernelSettings:
    alpha: tuple
    t: tuple
    y_max: float
    alias_tol: float
    tail_tol: float
    mass_tol: float
    closed_form_tol: float


@dataclass
class NoiseSettings:
    spec: NoiseSpec
    draws: int
    lags: tuple
    stream_id: int
    tolerance: float


@dataclass
class RunConfig:
    resolved: dict
    seed_base: int
    model: ModelSpec
    solver: SolverConfig
    batch: int
    export_paths: int
    estimator: EstimatorSettings
    kernel: KernelSettings
    noise: NoiseSettings
    verify_checks: list | None
    verify_options: dict


def _build_model(cfg):
    m = cfg["model"]
    alpha = _num(cfg, "model.alpha", 1, 2, lo_open=True)
    beta = _num(cfg, "model.beta", 0, 1, lo_open=True, hi_open=True)
    rho = _num(cfg, "model.rho", 0, 1, lo_open=True)
    K = _num(cfg, "model.K", lo=0, allow_none=True)
    s = m["sigma"]
    if not isinstance(s, dict):
        raise ConfigError("model.sigma", "expected an object")
    try:
        sigma = Sigma(s["kind"], _num(cfg, "model.sigma.value"), _num(cfg, "model.sigma.a"),
                      _num(cfg, "model.sigma.b"))
    except FracHeatError as exc:
        raise ConfigError("model.sigma.kind", str(exc)) from None
    p = m["phi"]
    phases = p["phases"]
    if phases is not None and not (isinstance(phases, list) and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in phases)):
        raise ConfigError("model.phi.phases", "expected null or a list of numbers")
    try:
        phi = InitialCondition(p["kind"], _num(cfg, "model.phi.value"), _num(cfg, "model.phi.amplitude"),
                               _num(cfg, "model.phi.mode", integer=True),
                               _num(cfg, "model.phi.rho", 0, 1, lo_open=True),
                               None if phases is None else tuple(phases))
    except FracHeatError as exc:
        raise ConfigError("model.phi.kind", str(exc)) from None
    try:
        return ModelSpec(alpha, beta, sigma, phi, K, rho)
    except FracHeatError as exc:
        raise ConfigError("model.K", str(exc)) from None


def _build_estimator(cfg, grid):
    ks = _num_list(cfg, "estimator.k", lo=1)
    space_window = _window(cfg, "estimator.space_window") or (4 * grid.dx, 16 * grid.dx)
    if space_window[1] > grid.L / 8 * (1 + 1e-12) or space_window[0] < 4 * grid.dx * (1 - 1e-12):
        raise ConfigError("estimator.space_window", f"must lie within [4 dx, L/8] = [{4 * grid.dx}, {grid.L / 8}]")
    n_space = _num(cfg, "estimator.space_lag_count", lo=4, integer=True)
    space_lags = tuple(float(x) for x in log_lags(space_window[0], space_window[1], grid.dx, n_space))
    T, dt = grid.T, grid.dt
    base = _num(cfg, "estimator.base_time", lo=0, allow_none=True)
    burn_in = _num(cfg, "estimator.burn_in", lo=0, allow_none=True)
    burn_in = T / 2 if burn_in is None else burn_in
    base = burn_in if base is None else base
    if base < burn_in:
        raise ConfigError("estimator.base_time", f"must be at least the burn-in time {burn_in}")
    time_window = _window(cfg, "estimator.time_window") or (10 * dt, 100 * dt)
    if base + time_window[1] > T * (1 + 1e-12):
        raise ConfigError("estimator.time_window", f"base time {base} + {time_window[1]} exceeds T={T}")
    n_time = _num(cfg, "estimator.time_lag_count", lo=4, integer=True)
    time_lags = tuple(float(x) for x in log_lags(time_window[0], time_window[1], dt, n_time))
    if len(space_lags) < 4 or len(time_lags) < 4:
        raise ConfigError("estimator.space_window" if len(space_lags) < 4 else "estimator.time_window",
                          "window holds fewer than 4 distinct grid lags")
    law = cfg["estimator"]["oracle_law"]
    if law not in ("scheme", "continuous"):
        raise ConfigError("estimator.oracle_law", f"expected 'scheme' or 'continuous', got {law!r}")
    tol = _num(cfg, "estimator.oracle_tol", 0, lo_open=True)
    return EstimatorSettings(tuple(ks), space_lags, space_window, time_lags, time_window,
                             base, burn_in, law, tol)


def snapshot_times(grid, est: EstimatorSettings):
    times = {round(est.base_time, 12), round(grid.T, 12)}
    times.update(round(est.base_time + d, 12) for d in est.time_lags)
    return tuple(sorted(times))


def build(raw: dict, seed=None, paths=None) -> RunConfig:
    cfg = _merge(DEFAULTS, raw, "")
    if seed is not None:
        cfg["seed_base"] = seed
    if paths is not None:
        cfg["solver"]["path_count"] = paths
    seed_base = _num(cfg, "seed_base", 0, U64_MAX, integer=True)
    model = _build_model(cfg)

    L = _num(cfg, "solver.L", 0, lo_open=True)
    N = _power_of_two(cfg, "solver.N")
    dt = _num(cfg, "solver.dt", 0, lo_open=True)
    T = _num(cfg, "solver.T", 0, lo_open=True)
    if abs(T / dt - round(T / dt)) > 1e-9 * max(1.0, T / dt):
        raise ConfigError("solver.T", f"must be a multiple of dt={dt}")
    grid = GridSpec(L, N, dt, T)
    path_count = _num(cfg, "solver.path_count", 2, integer=True)
    workers = _num(cfg, "solver.workers", 1, integer=True)
    batch = _num(cfg, "solver.batch", 1, integer=True)
    export_paths = _num(cfg, "solver.export_paths", 0, integer=True)
    zero_rule = _zero_mode(cfg, "solver.zero_mode")
    est = _build_estimator(cfg, grid)
    solver = SolverConfig(grid, snapshot_times(grid, est), seed_base, path_count,
                          _resolve_zero_mode(zero_rule, model.beta, L),
                          _bool(cfg, "solver", "dealias"), workers,
                          _bool(cfg, "solver", "strict_torus"))

    kalpha = _num_list(cfg, "kernel.alpha", lo=0, lo_open=True)
    if any(a > 2 for a in kalpha):
        raise ConfigError("kernel.alpha", "entries must lie in (0, 2]")
    kernel = KernelSettings(tuple(kalpha), tuple(_num_list(cfg, "kernel.t", lo=0, lo_open=True)),
                            _num(cfg, "kernel.y_max", 0, lo_open=True),
                            _num(cfg, "kernel.alias_tol", 0, 1, lo_open=True),
                            _num(cfg, "kernel.tail_tol", 0, 1, lo_open=True),
                            _num(cfg, "kernel.mass_tol", 0, lo_open=True),
                            _num(cfg, "kernel.closed_form_tol", 0, lo_open=True))

    nbeta = _num(cfg, "noise.beta", 0, 1, lo_open=True, hi_open=True)
    nL = _num(cfg, "noise.L", 0, lo_open=True)
    ngrid = GridSpec(nL, _power_of_two(cfg, "noise.N"))
    nrule = _zero_mode(cfg, "noise.zero_mode")
    nspec = NoiseSpec(nbeta, ngrid, _num(cfg, "noise.dt", 0, lo_open=True), seed_base,
                      _resolve_zero_mode(nrule, nbeta, nL))
    nlags = _num_list(cfg, "noise.lags", lo=0, lo_open=True)
    for lag in nlags:
        m = lag / ngrid.dx
        if abs(m - round(m)) > 1e-9 * max(1.0, m):
            raise ConfigError("noise.lags", f"lag {lag} is not a multiple of dx={ngrid.dx}")
    noise = NoiseSettings(nspec, _num(cfg, "noise.draws", 2, integer=True), tuple(nlags),
                          _num(cfg, "noise.stream_id", 0, U64_MAX, integer=True),
                          _num(cfg, "noise.tolerance", 0, lo_open=True))

    checks = cfg["verify"]["checks"]
    from .lemma_verifier import CHECKS
    if checks is not None:
        if not (isinstance(checks, list) and all(c in CHECKS for c in checks)):
            raise ConfigError("verify.checks", f"expected null or a list drawn from {sorted(CHECKS)}")
    options = cfg["verify"]["options"]
    if not isinstance(options, dict) or any(k not in CHECKS or not isinstance(v, dict)
                                            for k, v in options.items()):
        raise ConfigError("verify.options", "expected an object mapping check names to keyword objects")

    cfg["seed_base"] = seed_base
    cfg["solver"]["path_count"] = path_count
    return RunConfig(cfg, seed_base, model, solver, batch, export_paths, est, kernel, noise,
                     checks, options)


def load(path, seed=None, paths=None) -> RunConfig:
    """Read a JSON config (or a previous run's manifest) and validate it."""
    if path is None:
        return build({}, seed, paths)
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("--config", f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
                                      f"{exc.msg}") from None
    if isinstance(raw, dict) and "manifest_version" in raw and "config" in raw:
        raw = raw["config"]
    return build(raw, seed, paths)
