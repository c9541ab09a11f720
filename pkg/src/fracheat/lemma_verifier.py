"""Numerical checks of the kernel estimates, L1 moduli, smoothing bounds and
the spectral identities used in the moment estimates.

Each check sweeps a parameter grid, fits the best constant in the inequality,
and looks at how that constant moves across decades of the scale parameter.
Nothing here is random.
"""

from __future__ import annotations

import math

import numpy as np

from . import heat_kernel as hk
from .noise_field import riesz_constant
from .reports import CheckReport

STABILITY_CAP = 3.0
COLLAPSE_TOL = 0.01
MODULUS_CAP = 2.0
CAP_SLACK = 1e-9  # roundoff allowance on the cap
ERF_TOL = 1e-6

DEFAULT_ALPHAS = (1.2, 1.5, 1.8, 2.0)
DEFAULT_TIMES = (0.01, 0.1, 1.0, 10.0)
DEFAULT_BETAS = (0.2, 0.5, 0.8)


def _ratio(values):
    values = np.asarray(values, dtype=float)
    lo = np.min(values)
    return float(np.max(values) / lo) if lo > 0 else math.inf


# ---------------------------------------------------------------------------
# two-sided kernel estimate


def _scaled_rows(alpha, t, y_max, alias_tol):
    """FFT kernel table at time t, restricted to ``|x| <= y_max t^{1/alpha}``.

    The torus is at least twice as long as the sweep so that the periodic
    images stay far from every sampled point.
    """
    s = t ** (1.0 / alpha)
    grid = hk.auto_grid(alpha, t, alias_tol=alias_tol, min_half_width=2 * y_max * s)
    q = hk.KernelQuery(alpha, t, grid=grid, alias_tol=alias_tol)
    table = hk.kernel_table(q)
    r = hk.kernel_bound_ratio(q, table)
    keep = np.abs(r.scaled) <= y_max * (1 + 1e-12)
    return r.scaled[keep], r.ratio[keep], table.diagnostics


def check_kernel_bounds(alpha_list=DEFAULT_ALPHAS, t_list=DEFAULT_TIMES, y_max=10.0,
                        n_reference=41, alias_tol=1e-6) -> CheckReport:
    """Ratio ``p_t(x) (t^{1/alpha} + |x|)^{1+alpha} / t`` over ``|x| <= y_max t^{1/alpha}``.

    Per alpha: ``c1`` = min and ``c2`` = max ratio at each t; ``c2/c1`` must
    agree across t to 1%, and the FFT ratio curve at every t must match the
    quadrature curve of ``p_1`` (rescaled) to 1%.
    """
    rows = {}
    worst_collapse = 0.0
    worst_spread = 1.0
    violations = 0
    c_all = []
    for alpha in alpha_list:
        spans, per_t = [], {}
        ref_y = None
        ref = None
        for t in t_list:
            y, ratio, diag = _scaled_rows(alpha, t, y_max, alias_tol)
            if ref_y is None:
                pick = np.unique(np.linspace(0, y.size - 1, n_reference).round().astype(int))
                ref_y = y[pick]
                vals = hk.kernel_at(alpha, 1.0, ref_y)
                ref = vals * (1 + np.abs(ref_y)) ** (1 + alpha)
            got = np.interp(ref_y, y, ratio)
            collapse = float(np.max(np.abs(got / ref - 1)))
            c1, c2 = float(np.min(ratio)), float(np.max(ratio))
            per_t[t] = {"c1": c1, "c2": c2, "collapse_err": collapse,
                        "n_negative": diag.get("n_negative", 0)}
            spans.append(c2 / c1)
            c_all.extend([c1, c2])
            worst_collapse = max(worst_collapse, collapse)
            if c1 <= 0 or not math.isfinite(c2) or collapse > COLLAPSE_TOL:
                violations += 1
        spread = _ratio(spans)
        worst_spread = max(worst_spread, spread)
        if spread > 1 + COLLAPSE_TOL:
            violations += 1
        rows[str(alpha)] = {"per_t": {str(t): v for t, v in per_t.items()}, "c2_over_c1_spread": spread}
    return CheckReport(
        "kernel_bounds",
        {"alpha": list(alpha_list), "t": list(t_list), "y_max": y_max},
        fitted_constant=max(c_all) if c_all else math.nan,
        stability_ratio=worst_spread,
        violations=violations,
        passed=violations == 0,
        tolerance=COLLAPSE_TOL,
        cap=1 + COLLAPSE_TOL,
        details={"max_collapse_err": worst_collapse, "c1_min": min(c_all) if c_all else math.nan,
                 "rows": rows},
    )


def check_gradient_bound(alpha_list=DEFAULT_ALPHAS, t_list=DEFAULT_TIMES, y_max=10.0,
                         alias_tol=1e-6) -> CheckReport:
    """``|dp_t/dx| (t^{1/alpha} + |x|)^{3+alpha} / (t |x|)`` bounded over the
    sweep, with the bound stable across t."""
    per_alpha = {}
    violations = 0
    worst = 1.0
    best = 0.0
    for alpha in alpha_list:
        consts = []
        for t in t_list:
            grid = hk.auto_grid(alpha, t, alias_tol=alias_tol,
                                min_half_width=2 * y_max * t ** (1.0 / alpha))
            r = hk.gradient_bound_ratio(hk.KernelQuery(alpha, t, grid=grid, alias_tol=alias_tol))
            keep = np.abs(r.scaled) <= y_max
            c = float(np.max(r.ratio[keep]))
            if not math.isfinite(c):
                violations += 1
            consts.append(c)
        spread = _ratio(consts)
        per_alpha[str(alpha)] = {"C": dict(zip(map(str, t_list), consts)), "spread": spread}
        worst = max(worst, spread)
        best = max(best, max(consts))
    return CheckReport(
        "gradient_bound",
        {"alpha": list(alpha_list), "t": list(t_list), "y_max": y_max},
        fitted_constant=best,
        stability_ratio=worst,
        violations=violations,
        passed=violations == 0 and worst <= STABILITY_CAP,
        tolerance=STABILITY_CAP,
        cap=STABILITY_CAP,
        details={"per_alpha": per_alpha},
    )


# ---------------------------------------------------------------------------
# L1 moduli


DEFAULT_X_SWEEP = tuple(np.geomspace(1e-3, 10.0, 25))
DEFAULT_EPS_OVER_T = tuple(np.geomspace(1e-3, 10.0, 25))


def check_space_modulus(alpha_list=DEFAULT_ALPHAS, t_list=DEFAULT_TIMES,
                        x_sweep=DEFAULT_X_SWEEP) -> CheckReport:
    """``int |p_t(y - x) - p_t(y)| dy <= C ((|x| / t^{1/alpha}) ^ 1)``.

    The constant is fitted per t; x = 0 is skipped (both sides vanish).
    Values must also stay below 2, and the alpha = 2 rows must match the erf
    closed form.
    """
    x = np.asarray(x_sweep, dtype=float)
    x = x[x != 0]
    per_alpha = {}
    violations = 0
    worst_spread = 1.0
    best = 0.0
    erf_err = 0.0
    for alpha in alpha_list:
        consts = []
        for t in t_list:
            vals = hk.l1_space_modulus(alpha, t, x)
            bound = np.minimum(np.abs(x) / t ** (1 / alpha), 1.0)
            consts.append(float(np.max(vals / bound)))
            violations += int(np.count_nonzero(vals > MODULUS_CAP + CAP_SLACK))
            if alpha == 2:
                err = float(np.max(np.abs(vals - hk.gaussian_space_modulus(t, x))))
                erf_err = max(erf_err, err)
        spread = _ratio(consts)
        per_alpha[str(alpha)] = {"C": dict(zip(map(str, t_list), consts)), "spread": spread}
        worst_spread = max(worst_spread, spread)
        best = max(best, max(consts))
    if erf_err > ERF_TOL:
        violations += 1
    return CheckReport(
        "space_modulus",
        {"alpha": list(alpha_list), "t": list(t_list), "x": [float(x.min()), float(x.max()), int(x.size)]},
        fitted_constant=best,
        stability_ratio=worst_spread,
        violations=violations,
        passed=violations == 0 and worst_spread <= STABILITY_CAP,
        tolerance=ERF_TOL,
        cap=STABILITY_CAP,
        details={"per_alpha": per_alpha, "gaussian_max_abs_err": erf_err, "cap": MODULUS_CAP},
    )


def check_time_modulus(alpha_list=DEFAULT_ALPHAS, t_list=DEFAULT_TIMES,
                       eps_over_t=DEFAULT_EPS_OVER_T) -> CheckReport:
    """``int |p_{t+eps} - p_t| <= C ((log(t+eps) - log t) ^ 1)``, constant outside.

    The other reading, ``(C log(1 + eps/t)) ^ 1``, is also evaluated and
    reported: it cannot hold once the L1 distance exceeds 1.
    """
    r = np.asarray(eps_over_t, dtype=float)
    r = r[r != 0]
    per_alpha = {}
    violations = 0
    worst_spread = 1.0
    best = 0.0
    erf_err = 0.0
    inside_fail = 0
    for alpha in alpha_list:
        consts, inside = [], []
        for t in t_list:
            eps = r * t
            vals = hk.l1_time_modulus(alpha, t, eps)
            logs = np.log1p(r)
            consts.append(float(np.max(vals / np.minimum(logs, 1.0))))
            inside.append(float(np.max(vals[logs < 1] / logs[logs < 1])) if np.any(logs < 1) else 0.0)
            inside_fail += int(np.count_nonzero(vals > 1.0))
            violations += int(np.count_nonzero(vals > MODULUS_CAP + CAP_SLACK))
            if alpha == 2:
                erf_err = max(erf_err, float(np.max(np.abs(vals - hk.gaussian_time_modulus(t, eps)))))
        spread = _ratio(consts)
        per_alpha[str(alpha)] = {"C_outside": dict(zip(map(str, t_list), consts)),
                                 "C_inside_unsaturated": dict(zip(map(str, t_list), inside)),
                                 "spread": spread}
        worst_spread = max(worst_spread, spread)
        best = max(best, max(consts))
    if erf_err > ERF_TOL:
        violations += 1
    return CheckReport(
        "time_modulus",
        {"alpha": list(alpha_list), "t": list(t_list),
         "eps_over_t": [float(r.min()), float(r.max()), int(r.size)]},
        fitted_constant=best,
        stability_ratio=worst_spread,
        violations=violations,
        passed=violations == 0 and worst_spread <= STABILITY_CAP,
        tolerance=ERF_TOL,
        cap=STABILITY_CAP,
        details={"per_alpha": per_alpha, "gaussian_max_abs_err": erf_err, "cap": MODULUS_CAP,
                 "inside_reading_points_above_1": inside_fail},
    )


# ---------------------------------------------------------------------------
# smoothing of Hölder functions


DEFAULT_SMOOTH_T = (1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0)
DEFAULT_LAG_DECADES = (1e-3, 1e-2, 1e-1, 1.0)
_LAG_SCALED_T = (1e-2, 1e-1, 1.0)


def _times_for_lag(t_list, alpha, h):
    """Fixed times plus times whose kernel width is a small fraction of the lag."""
    return sorted(set(t_list) | {tau * h**alpha for tau in _LAG_SCALED_T})


def check_smoothing(alpha=1.5, t_list=DEFAULT_SMOOTH_T, rho_list=(0.25, 0.5, 0.75, 1.0),
                    lags=DEFAULT_LAG_DECADES, n_base=9) -> CheckReport:
    """Space gap ``<= C |x - z|^rho`` and time gap ``<= C delta^{rho/alpha}`` for
    ``w = |sin y|^rho``.

    For each lag decade the constant is the sup over t and base points
    (the cusp of w at 0 included); the spread is taken across decades.  The
    times include ``tau h^alpha`` for small tau so that every decade sees
    kernels much narrower than the lag.
    A constant test function must give identically zero gaps.
    """
    alphas = np.atleast_1d(alpha).astype(float)
    base = np.concatenate(([0.0], np.linspace(0.05, math.pi / 2, n_base - 1)))
    per = {}
    worst_spread = 1.0
    best = 0.0
    violations = 0
    for a in alphas:
        for rho in rho_list:
            w = hk.AbsSinePower(rho)
            cs, ct = [], []
            for h in lags:
                times = _times_for_lag(t_list, a, h)
                cs.append(max(float(np.max(hk.smoothing_space_gap(a, t, base, base + h, w))) / h**rho
                              for t in times))
                ct.append(max(float(np.max(hk.smoothing_time_gap(a, t, h, base, w))) / h ** (rho / a)
                              for t in times))
            s = max(_ratio(cs), _ratio(ct))
            per[f"{a}/{rho}"] = {"space_C": cs, "time_C": ct, "spread": s}
            worst_spread = max(worst_spread, s)
            best = max(best, max(cs), max(ct))
            if not all(math.isfinite(c) for c in cs + ct):
                violations += 1
            # convolution with a probability density cannot raise the Hölder constant
            if max(cs) > w.holder_constant * (1 + 1e-9):
                violations += 1
    const = hk.ConstantFunction(2.0)
    zero_gap = max(float(np.max(hk.smoothing_space_gap(alphas[0], 0.1, base, base + 0.3, const))),
                   float(np.max(hk.smoothing_time_gap(alphas[0], 0.1, 0.3, base, const))))
    if zero_gap > 1e-12:
        violations += 1
    return CheckReport(
        "smoothing",
        {"alpha": alphas.tolist(), "t": list(t_list), "rho": list(rho_list), "lags": list(lags)},
        fitted_constant=best,
        stability_ratio=worst_spread,
        violations=violations,
        passed=violations == 0 and worst_spread <= STABILITY_CAP,
        tolerance=STABILITY_CAP,
        cap=STABILITY_CAP,
        details={"per_alpha_rho": per, "constant_function_gap": zero_gap},
    )


# ---------------------------------------------------------------------------
# spectral identities


SLOPE_TOL = 1e-3
IDENTITY_TOL = 1e-6


def check_riesz_sup(alpha=DEFAULT_ALPHAS, beta_list=DEFAULT_BETAS, t_sweep=(0.1, 1.0, 10.0)) -> CheckReport:
    """``(p_t * f_beta)(0)`` by quadrature: log-log slope in t equal to
    ``-beta/alpha`` and agreement with the Gamma closed form.

    The fitted constant is ``max (p_t * f_beta)(0) t^{beta/alpha} / c_{1-beta}``.
    """
    alphas = np.atleast_1d(alpha).astype(float)
    ts = np.asarray(t_sweep, dtype=float)
    worst_slope = 0.0
    worst_rel = 0.0
    best = 0.0
    cells = []
    for a in alphas:
        for b in beta_list:
            vals = np.array([hk.riesz_smoothed_at_zero(a, b, t) for t in ts])
            closed = np.array([hk.riesz_smoothed_closed_form(a, b, t) for t in ts])
            slope = float(np.polyfit(np.log(ts), np.log(vals), 1)[0])
            rel = float(np.max(np.abs(vals / closed - 1)))
            worst_slope = max(worst_slope, abs(slope + b / a))
            worst_rel = max(worst_rel, rel)
            best = max(best, float(np.max(vals * ts ** (b / a))) / riesz_constant(1 - b))
            cells.append({"alpha": float(a), "beta": b, "slope": slope, "rel_err": rel})
    violations = int(worst_slope > SLOPE_TOL) + int(worst_rel > IDENTITY_TOL)
    return CheckReport(
        "riesz_sup",
        {"alpha": alphas.tolist(), "beta": list(beta_list), "t": ts.tolist()},
        fitted_constant=best,
        stability_ratio=None,
        violations=violations,
        passed=violations == 0,
        tolerance=SLOPE_TOL,
        details={"max_slope_err": worst_slope, "max_rel_err": worst_rel, "cells": cells},
    )


def check_gamma_identity(alpha_grid=DEFAULT_ALPHAS, beta_grid=DEFAULT_BETAS,
                         t_grid=(0.1, 1.0, 10.0), stress=((1.5, 0.99, 1.0),)) -> CheckReport:
    """Quadrature of ``int |xi|^{beta-1} exp(-2t (2 pi |xi|)^alpha)`` against
    ``2 Gamma(beta/alpha) / (alpha (2^{alpha+1} pi^alpha t)^{beta/alpha})``."""
    cells = [(a, b, t) for a in alpha_grid for b in beta_grid for t in t_grid] + list(stress)
    records = [hk.weighted_transform_energy(a, b, t) for a, b, t in cells]
    errs = np.array([r.rel_err for r in records])
    worst = records[int(np.argmax(errs))]
    return CheckReport(
        "gamma_identity",
        {"alpha": list(alpha_grid), "beta": list(beta_grid), "t": list(t_grid),
         "stress": [list(c) for c in stress]},
        fitted_constant=float(np.max(errs)),
        stability_ratio=None,
        violations=int(np.count_nonzero(errs >= IDENTITY_TOL)),
        passed=bool(np.all(errs < IDENTITY_TOL)),
        tolerance=IDENTITY_TOL,
        details={"worst_cell": worst.to_record(), "n_cells": len(cells)},
    )


def _log_gap(mu, r):
    """``log(1 + mu) - mu^r``; positive where the inequality fails."""
    return np.log1p(mu) - mu**r


def critical_exponent(mu=None, lo=0.1, hi=0.5, iters=60):
    """Smallest r with ``log(1 + mu) <= mu^r`` for all mu > 0 (bisection on the
    maximum gap over a log grid)."""
    mu = np.logspace(-8, 8, 200001) if mu is None else mu
    if np.max(_log_gap(mu, hi)) > 0:
        return hi
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if np.max(_log_gap(mu, mid)) > 0:
            lo = mid
        else:
            hi = mid
    return hi


def check_log_inequality(mu_grid=None, r_grid=None, probe_r=(0.45, 0.4, 0.35, 0.3)) -> CheckReport:
    """``0 < log(1 + mu) <= mu^r`` on an exhaustive grid for r in [1/2, 1],
    plus a search for failures below 1/2."""
    mu = np.logspace(-6, 3, 10_000) if mu_grid is None else np.asarray(mu_grid, float)
    r = np.linspace(0.5, 1.0, 101) if r_grid is None else np.asarray(r_grid, float)
    lhs = np.log1p(mu)[None, :]
    rhs = mu[None, :] ** r[:, None]
    bad = (lhs <= 0) | (lhs > rhs)
    ratio = float(np.max(lhs / rhs))
    wide = np.logspace(-8, 8, 200001)
    probes = {}
    for pr in probe_r:
        gap = _log_gap(wide, pr)
        i = int(np.argmax(gap))
        probes[str(pr)] = {"violated": bool(gap[i] > 0), "mu_at_max_gap": float(wide[i]),
                           "max_gap": float(gap[i])}
    return CheckReport(
        "log_inequality",
        {"mu": [float(mu.min()), float(mu.max()), int(mu.size)], "r": [float(r.min()), float(r.max()), int(r.size)]},
        fitted_constant=ratio,
        stability_ratio=None,
        violations=int(np.count_nonzero(bad)),
        passed=not bool(np.any(bad)),
        tolerance=0.0,
        details={"max_lhs_over_rhs": ratio, "probes": probes, "critical_r": critical_exponent(wide)},
    )


CHECKS = {
    "kernel_bounds": check_kernel_bounds,
    "gradient_bound": check_gradient_bound,
    "space_modulus": check_space_modulus,
    "time_modulus": check_time_modulus,
    "smoothing": check_smoothing,
    "riesz_sup": check_riesz_sup,
    "gamma_identity": check_gamma_identity,
    "log_inequality": check_log_inequality,
}


def run_all(names=None, options=None) -> list:
    """Run the named checks (all by default) with optional keyword overrides
    per check: ``options = {"smoothing": {"alpha": 1.2}}``."""
    options = options or {}
    names = list(CHECKS) if names is None else list(names)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks {unknown}; available {list(CHECKS)}")
    return [CHECKS[n](**options.get(n, {})) for n in names]


def summary_table(reports) -> str:
    return "\n".join(r.summary_line() for r in reports)
