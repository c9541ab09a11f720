"""Moment scaling of simulated fields and comparison with the Hölder bounds.

Structure functions are averaged over the torus (the law of the field is
translation invariant) and over paths; standard errors come from the
leave-one-path-out jackknife.  Per-path quantities are computed first and
summed in stream order, so results do not depend on how paths were produced.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DegenerateDataError, InputError, ParameterError, RangeError, UsageError
from .grid import GridSpec
from .reports import CheckReport

AXES = ("space", "time")
BOUND_SLACK = 0.02


@dataclass(eq=False)
class MomentTable:
    axis: str
    k: float
    lags: np.ndarray
    moments: np.ndarray
    stderrs: np.ndarray

    def __post_init__(self):
        if self.axis not in AXES:
            raise ParameterError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not self.k >= 1:
            raise ParameterError(f"moment order must be at least 1, got {self.k}")
        self.lags = np.asarray(self.lags, dtype=float)
        self.moments = np.asarray(self.moments, dtype=float)
        self.stderrs = np.asarray(self.stderrs, dtype=float)
        if not (self.lags.shape == self.moments.shape == self.stderrs.shape) or self.lags.ndim != 1:
            raise InputError("lags, moments and stderrs must be 1-d arrays of equal length")
        if np.any(np.diff(self.lags) <= 0):
            raise InputError("lags must be strictly increasing")
        if np.any(self.moments < 0) or np.any(self.stderrs < 0):
            raise InputError("moments and standard errors must be nonnegative")

    def rows(self) -> list:
        return [(self.axis, self.k, float(l), float(m), float(s))
                for l, m, s in zip(self.lags, self.moments, self.stderrs)]

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(["axis", "k", "lag", "moment", "stderr"])
        for axis, k, l, m, s in self.rows():
            w.writerow([axis, repr(k), repr(l), repr(m), repr(s)])
        return buf.getvalue()


@dataclass
class ExponentFit:
    slope: float
    intercept: float
    slope_stderr: float
    window: tuple
    axis: str
    k: float
    n_points: int

    def to_record(self) -> dict:
        return {"axis": self.axis, "k": self.k, "slope": self.slope, "intercept": self.intercept,
                "slope_stderr": self.slope_stderr, "window": list(self.window),
                "n_points": self.n_points}


@dataclass
class TheoremBounds:
    alpha: float
    beta: float
    rho: float
    k: float
    b_sup: float
    c_sup: float
    d_sup: float
    temporal_applicable: bool

    def sup(self, axis: str) -> float:
        if axis == "space":
            return self.c_sup
        if axis == "time":
            return self.d_sup
        raise UsageError(f"axis must be one of {AXES}, got {axis!r}")

    def to_record(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "rho": self.rho, "k": self.k,
                "b_sup": self.b_sup, "c_sup": self.c_sup, "d_sup": self.d_sup,
                "temporal_applicable": self.temporal_applicable}


def lag_window(grid: GridSpec) -> tuple:
    """Spatial lags usable for scaling fits: ``[4 dx, L/8]``."""
    return (4 * grid.dx, grid.L / 8)


def _jackknife(per_path: np.ndarray):
    """Mean over rows and its jackknife standard error (equal to the usual
    ``sd / sqrt(n)`` for a plain mean, computed the long way for clarity)."""
    n = per_path.shape[0]
    total = np.sum(per_path, axis=0)
    mean = total / n
    loo = (total[None, :] - per_path) / (n - 1)
    var = (n - 1) / n * np.sum((loo - mean) ** 2, axis=0)
    return mean, np.sqrt(var)


def _check_paths(arr, what):
    if arr.size == 0 or arr.shape[0] == 0:
        raise InputError(f"empty ensemble for {what}")
    if arr.shape[0] < 2:
        raise InputError(f"{what} needs at least two paths")


def spatial_structure(fields, k, lags, grid: GridSpec, check_window: bool = True) -> MomentTable:
    """``E|u(x+h) - u(x)|^k`` from ``fields[path, x]`` at one time.

    Lag 0 is allowed and gives 0; other lags must be grid multiples inside
    :func:`lag_window` unless ``check_window`` is off.
    """
    arr = np.asarray(fields, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    _check_paths(arr, "spatial structure")
    if arr.shape[1] != grid.N:
        raise InputError(f"fields have {arr.shape[1]} points, grid has {grid.N}")
    lags = np.asarray(lags, dtype=float)
    lo, hi = lag_window(grid)
    per_path = np.empty((arr.shape[0], lags.size))
    for i, h in enumerate(lags):
        j = grid.lag_index(h)
        if check_window and h != 0 and not (lo * (1 - 1e-12) <= abs(h) <= hi * (1 + 1e-12)):
            raise ParameterError(f"lag {h} outside the window [{lo}, {hi}]")
        per_path[:, i] = np.mean(np.abs(np.roll(arr, -j, axis=1) - arr) ** k, axis=1)
    mean, err = _jackknife(per_path)
    return MomentTable("space", k, lags, mean, err)


def temporal_structure(ensemble, base_time, k, lags, burn_in: float | None = None) -> MomentTable:
    """``E|u(t+delta, x) - u(t, x)|^k`` averaged over x and paths.

    ``ensemble`` must hold snapshots at ``base_time`` and ``base_time + delta``
    for every lag.
    """
    if burn_in is not None and base_time < burn_in - 1e-12:
        raise ParameterError(f"base time {base_time} precedes the burn-in time {burn_in}")
    lags = np.asarray(lags, dtype=float)
    if np.any(lags < 0):
        raise ParameterError("time lags must be nonnegative")
    u0 = ensemble.at(base_time)
    _check_paths(u0, "temporal structure")
    per_path = np.empty((u0.shape[0], lags.size))
    for i, d in enumerate(lags):
        u1 = u0 if d == 0 else ensemble.at(base_time + d)
        per_path[:, i] = np.mean(np.abs(u1 - u0) ** k, axis=1)
    mean, err = _jackknife(per_path)
    return MomentTable("time", k, lags, mean, err)


def fit_exponent(table: MomentTable, window) -> ExponentFit:
    """Least-squares slope of log moment against log lag over ``window``."""
    lo, hi = float(window[0]), float(window[1])
    sel = (table.lags >= lo * (1 - 1e-12)) & (table.lags <= hi * (1 + 1e-12))
    n = int(np.count_nonzero(sel))
    if n < 4:
        raise DegenerateDataError(f"need at least 4 lags in the window [{lo}, {hi}], got {n}")
    m = table.moments[sel]
    if np.any(m <= 0):
        raise DegenerateDataError("nonpositive moment inside the fit window")
    res = stats.linregress(np.log(table.lags[sel]), np.log(m))
    return ExponentFit(float(res.slope), float(res.intercept), float(res.stderr),
                       (lo, hi), table.axis, table.k, n)


def theorem_bounds(alpha, beta, rho, k=2) -> TheoremBounds:
    """Suprema of the admissible Hölder exponents.

    ``b_sup = 1 - 1/alpha``, ``c_sup = (alpha-1)/2 ^ rho`` and
    ``d_sup = (alpha-beta)/(2 alpha) ^ rho/alpha``; the temporal bound needs
    ``beta <= alpha/2``.
    """
    if not (1 < alpha <= 2):
        raise RangeError(f"spatial moment bound requires alpha in (1, 2], got {alpha}")
    if not (0 < beta < 1):
        raise RangeError(f"spatial moment bound requires beta in (0, 1), got {beta}")
    if not (0 < rho <= 1):
        raise RangeError(f"combined Hölder bound requires rho in (0, 1], got {rho}")
    if not k >= 2:
        raise RangeError(f"moment bounds are stated for k >= 2, got {k}")
    b_sup = 1 - 1 / alpha
    c_sup = min(alpha * b_sup / 2, rho)
    d_sup = min((alpha - beta) / (2 * alpha), rho / alpha)
    return TheoremBounds(alpha, beta, rho, k, b_sup, c_sup, d_sup, beta <= alpha / 2)


def consistency_report(fit: ExponentFit, bounds: TheoremBounds, k=None, axis=None,
                       slack: float = BOUND_SLACK) -> CheckReport:
    """Pass iff ``slope + 2 stderr >= k (sup - slack)``.

    The moment bounds are upper bounds on moments at small lags, so the
    fitted slope must not fall below ``k`` times the exponent.
    """
    k = fit.k if k is None else k
    if fit.k != k or bounds.k != k:
        raise UsageError(f"moment order mismatch: fit k={fit.k}, bounds k={bounds.k}, requested {k}")
    if axis is not None and axis != fit.axis:
        raise UsageError(f"axis mismatch: fit is {fit.axis!r}, requested {axis!r}")
    sup = bounds.sup(fit.axis)
    target = k * (sup - slack)
    margin = fit.slope + 2 * fit.slope_stderr - target
    applicable = fit.axis == "space" or bounds.temporal_applicable
    passed = bool(margin >= 0)
    name = f"{fit.axis}_exponent_bound"
    return CheckReport(
        name,
        {"alpha": bounds.alpha, "beta": bounds.beta, "rho": bounds.rho, "k": k,
         "window": list(fit.window)},
        fitted_constant=fit.slope,
        stability_ratio=None,
        violations=0 if passed else 1,
        passed=passed,
        tolerance=slack,
        applicable=applicable,
        details={"slope": fit.slope, "slope_stderr": fit.slope_stderr, "sup": sup,
                 "target": target, "margin": margin,
                 "note": "" if applicable else "beta > alpha/2: temporal bound not covered"},
    )


def jensen_violations(second: MomentTable, fourth: MomentTable, n_sigma: float = 2.0) -> int:
    """Lags where ``(E|D|^2)^2 > E|D|^4`` beyond ``n_sigma`` standard errors."""
    if second.k != 2 or fourth.k != 4 or not np.array_equal(second.lags, fourth.lags):
        raise UsageError("need k=2 and k=4 tables on the same lags")
    lhs = second.moments**2
    err = 2 * second.moments * second.stderrs + fourth.stderrs
    return int(np.count_nonzero(lhs - fourth.moments > n_sigma * err))


def monotonicity_violations(table: MomentTable, n_sigma: float = 2.0) -> int:
    d = np.diff(table.moments)
    err = np.hypot(table.stderrs[1:], table.stderrs[:-1])
    return int(np.count_nonzero(d < -n_sigma * err))


def log_lags(lo, hi, step, count=12):
    """About ``count`` log-spaced grid multiples of ``step`` in ``[lo, hi]``, deduplicated."""
    m = np.unique(np.round(np.geomspace(lo / step, hi / step, count)).astype(int))
    return m * step


def slope_interval(fit: ExponentFit, n_sigma: float = 2.0) -> tuple:
    return (fit.slope - n_sigma * fit.slope_stderr, fit.slope + n_sigma * fit.slope_stderr)
