"""Fractional heat kernel.

``p_t`` is the density whose Fourier transform (convention
``F f(xi) = int exp(-2 pi i xi x) f(x) dx``) is ``exp(-t (2 pi |xi|)^alpha)``,
i.e. the fundamental solution of ``v_t = -(-Delta)^{alpha/2} v``.  It is the
symmetric alpha-stable density with scale ``t^{1/alpha}``; alpha=2 gives the
Gaussian N(0, 2t), alpha=1 the Cauchy density ``t / (pi (t^2 + x^2))``.

Two evaluation routes are provided:

* grids (``KernelQuery.grid`` or the automatic grid): discrete inverse FFT of
  the transform on a periodic grid;
* explicit abscissae: oscillatory quadrature of the inverse transform
  (QUADPACK QAWO), one point at a time.  Slow, but independent of the FFT
  route, which is why the checks use it as a reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .errors import NumericalError, ParameterError, ResolutionError, InputError
from .grid import GridSpec

DEFAULT_TAIL_TOL = 1e-16
DEFAULT_ALIAS_TOL = 1e-8
MAX_AUTO_POINTS = 2**24
_QUAD_CUTOFF = 41.5  # exp(-41.5) < 1e-18


def _check_alpha(alpha):
    if not (0 < alpha <= 2):
        raise ParameterError(f"alpha must lie in (0, 2], got {alpha}")


def _check_alpha_t(alpha, t):
    _check_alpha(alpha)
    if not (np.isfinite(t) and t > 0):
        raise ParameterError(f"t must be positive, got {t}")


def symbol(alpha, xi):
    """Fourier symbol ``(2 pi |xi|)^alpha`` of the fractional Laplacian."""
    return (2.0 * np.pi * np.abs(xi)) ** alpha


def fourier_transform(alpha, t, xi):
    return np.exp(-t * symbol(alpha, xi))


def kernel_central_value(alpha: float, t: float) -> float:
    """Exact ``p_t(0) = Gamma(1 + 1/alpha) / (pi t^{1/alpha})``."""
    _check_alpha_t(alpha, t)
    return math.gamma(1.0 + 1.0 / alpha) / (math.pi * t ** (1.0 / alpha))


def _tail_envelope(alpha, y):
    """Generous upper estimate of ``p_1(y)`` for large ``|y|``, used only to size grids."""
    y = abs(y)
    gauss = math.exp(-y * y / 4.0) / math.sqrt(4 * math.pi)
    if alpha == 2:
        return gauss
    c = math.gamma(1 + alpha) * math.sin(math.pi * alpha / 2) / math.pi
    return 1.25 * (c * max(y, 1.0) ** (-1 - alpha) + gauss)


def auto_grid(alpha: float, t: float, *, t_max: float | None = None,
              tail_tol: float = DEFAULT_TAIL_TOL, alias_tol: float = DEFAULT_ALIAS_TOL,
              min_half_width: float = 0.0, max_points: int = MAX_AUTO_POINTS) -> GridSpec:
    """Periodic grid resolving ``p_s`` for every ``s`` in ``[t, t_max]``.

    ``L`` doubles until the kernel at ``L/2`` (time ``t_max``) is below
    ``alias_tol`` times its central value, then ``N`` doubles until the
    Fourier tail at the Nyquist frequency (time ``t``) is below ``tail_tol``.
    """
    _check_alpha_t(alpha, t)
    t_max = t if t_max is None else max(t, t_max)
    s_max = t_max ** (1.0 / alpha)
    target = alias_tol * math.gamma(1 + 1 / alpha) / math.pi
    L = 16.0 * s_max
    while _tail_envelope(alpha, L / 2 / s_max) > target or L / 2 < min_half_width:
        L *= 2.0
    N = 64
    while math.exp(-t * (math.pi * N / L) ** alpha) > tail_tol:
        N *= 2
        if N > max_points:
            raise ResolutionError(
                f"automatic grid for alpha={alpha}, t={t}, t_max={t_max} needs more than "
                f"{max_points} points", required_n=N, required_l=L)
    return GridSpec(L=L, N=N)


def required_points(alpha, t, L, tail_tol=DEFAULT_TAIL_TOL):
    """Smallest power-of-two N meeting the Fourier tail rule on a torus of length L."""
    N = 2
    while math.exp(-t * (math.pi * N / L) ** alpha) > tail_tol:
        N *= 2
    return N


@dataclass(eq=False)
class KernelQuery:
    """alpha, t and where to evaluate: a grid, explicit abscissae, or neither
    (automatic grid).

    ``periodic=True`` asks for the kernel of the torus itself (the periodised
    kernel), which skips the aliasing rule.
    """

    alpha: float
    t: float
    grid: GridSpec | None = None
    abscissae: np.ndarray | None = None
    periodic: bool = False
    tail_tol: float = DEFAULT_TAIL_TOL
    alias_tol: float = DEFAULT_ALIAS_TOL

    def __post_init__(self):
        _check_alpha_t(self.alpha, self.t)
        if self.grid is not None and self.abscissae is not None:
            raise ParameterError("give either a grid or explicit abscissae, not both")
        if self.abscissae is not None:
            self.abscissae = np.atleast_1d(np.asarray(self.abscissae, dtype=float))

    def resolve_grid(self) -> GridSpec:
        if self.grid is None:
            return auto_grid(self.alpha, self.t, tail_tol=self.tail_tol, alias_tol=self.alias_tol)
        g = self.grid
        if math.exp(-self.t * (math.pi * g.N / g.L) ** self.alpha) > self.tail_tol:
            n = required_points(self.alpha, self.t, g.L, self.tail_tol)
            raise ResolutionError(
                f"grid N={g.N} too coarse for alpha={self.alpha}, t={self.t}: "
                f"Fourier tail rule needs N >= {n}", required_n=n)
        if not self.periodic:
            s = self.t ** (1 / self.alpha)
            p0 = kernel_central_value(self.alpha, self.t)
            if _tail_envelope(self.alpha, g.L / 2 / s) / s > self.alias_tol * p0:
                raise ResolutionError(
                    f"grid L={g.L} too short for alpha={self.alpha}, t={self.t}: kernel at "
                    f"L/2 exceeds alias tolerance {self.alias_tol}")
        return g


@dataclass(eq=False)
class KernelTable:
    abscissae: np.ndarray
    values: np.ndarray
    alpha: float
    t: float
    grid: GridSpec | None = None
    periodic: bool = False
    diagnostics: dict = field(default_factory=dict)

    def clamped(self) -> np.ndarray:
        """Values with discretisation-level negatives set to zero (for sampling only)."""
        return np.maximum(self.values, 0.0)

    def mass(self) -> float:
        if self.grid is None:
            raise InputError("mass needs a uniform grid")
        return float(np.sum(self.values) * self.grid.dx)


def _natural_order_kernel(alpha, t, grid, derivative=False):
    xi = grid.rfreq()
    spec = fourier_transform(alpha, t, xi)
    if derivative:
        spec = spec * (2j * np.pi * xi)
        spec[-1] = 0.0
    return np.fft.irfft(spec, n=grid.N) * (grid.N / grid.L)


def _centered(values):
    out = np.fft.fftshift(values)
    return out


def _quad_kernel_point(alpha, t, x, derivative=False):
    s = t ** (1.0 / alpha)
    y = abs(x) / s
    upper = _QUAD_CUTOFF ** (1.0 / alpha)
    opts = dict(epsabs=1e-15, epsrel=1e-13, limit=2000)
    if derivative:
        if y == 0:
            return 0.0
        val, err, *rest = integrate.quad(lambda u: u * np.exp(-u**alpha), 0.0, upper,
                                         weight="sin", wvar=y, full_output=1, **opts)
        val = -math.copysign(1.0, x) * val / (math.pi * s * s)
    elif y == 0:
        return kernel_central_value(alpha, t)
    else:
        val, err, *rest = integrate.quad(lambda u: np.exp(-u**alpha), 0.0, upper,
                                         weight="cos", wvar=y, full_output=1, **opts)
        val = val / (math.pi * s)
    return float(val)


def kernel_at(alpha: float, t: float, x) -> np.ndarray:
    """Kernel at explicit abscissae by quadrature of the inverse transform."""
    _check_alpha_t(alpha, t)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return np.array([_quad_kernel_point(alpha, t, xv) for xv in x])


def kernel_gradient_at(alpha: float, t: float, x) -> np.ndarray:
    _check_alpha_t(alpha, t)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return np.array([_quad_kernel_point(alpha, t, xv, derivative=True) for xv in x])


def kernel_table(q: KernelQuery) -> KernelTable:
    """Sample ``p_t``.  On grids the result is exactly even; negative values
    caused by roundoff are kept and counted in ``diagnostics``."""
    if q.abscissae is not None:
        values = kernel_at(q.alpha, q.t, q.abscissae)
        return KernelTable(q.abscissae.copy(), values, q.alpha, q.t, None, False,
                           _negativity(values))
    grid = q.resolve_grid()
    for _ in range(8):
        raw = _natural_order_kernel(q.alpha, q.t, grid)
        edge = raw[grid.N // 2]
        if q.periodic or q.grid is not None or edge <= 2 * q.alias_tol * raw[0] + 1e-300:
            break
        # the envelope underestimated the tail; double the domain and retry
        grid = GridSpec(L=2 * grid.L, N=2 * grid.N)
    values = _centered(raw)
    values[1:] = 0.5 * (values[1:] + values[1:][::-1])
    diag = _negativity(values)
    diag["grid"] = grid.to_dict()
    return KernelTable(grid.centered_x(), values, q.alpha, q.t, grid, q.periodic, diag)


def _negativity(values):
    neg = values < 0
    return {"n_negative": int(np.count_nonzero(neg)),
            "min_value": float(values.min()) if values.size else 0.0}


def kernel_gradient_table(q: KernelQuery) -> KernelTable:
    """``dp_t/dx`` from the transform ``2 pi i xi exp(-t (2 pi |xi|)^alpha)``; exactly odd."""
    if q.abscissae is not None:
        values = kernel_gradient_at(q.alpha, q.t, q.abscissae)
        return KernelTable(q.abscissae.copy(), values, q.alpha, q.t)
    grid = q.resolve_grid()
    values = _centered(_natural_order_kernel(q.alpha, q.t, grid, derivative=True))
    values[1:] = 0.5 * (values[1:] - values[1:][::-1])
    values[0] = 0.0
    values[grid.N // 2] = 0.0
    return KernelTable(grid.centered_x(), values, q.alpha, q.t, grid, q.periodic,
                       {"grid": grid.to_dict()})


@dataclass(eq=False)
class RatioTable:
    abscissae: np.ndarray
    scaled: np.ndarray  # x / t^{1/alpha}
    ratio: np.ndarray
    alpha: float
    t: float


def kernel_bound_ratio(q: KernelQuery, table: KernelTable | None = None) -> RatioTable:
    """``p_t(x) (t^{1/alpha} + |x|)^{1+alpha} / t`` at every abscissa.

    The two-sided kernel estimate says this stays inside a fixed interval
    ``[c1, c2]`` depending on alpha only.
    """
    table = kernel_table(q) if table is None else table
    s = q.t ** (1.0 / q.alpha)
    x = table.abscissae
    ratio = table.values * (s + np.abs(x)) ** (1 + q.alpha) / q.t
    return RatioTable(x, x / s, ratio, q.alpha, q.t)


def gradient_bound_ratio(q: KernelQuery, table: KernelTable | None = None) -> RatioTable:
    """``|dp_t/dx| (t^{1/alpha} + |x|)^{3+alpha} / (t |x|)`` for ``x != 0``."""
    table = kernel_gradient_table(q) if table is None else table
    s = q.t ** (1.0 / q.alpha)
    x = table.abscissae
    keep = x != 0
    x = x[keep]
    ratio = np.abs(table.values[keep]) * (s + np.abs(x)) ** (3 + q.alpha) / (q.t * np.abs(x))
    return RatioTable(x, x / s, ratio, q.alpha, q.t)


def kernel_mass_outside(alpha: float, t: float, a: float) -> float:
    """``int_{|x| > a} p_t(x) dx`` from the sine transform of the kernel."""
    _check_alpha_t(alpha, t)
    if a <= 0:
        return 1.0
    upper = (_QUAD_CUTOFF / t) ** (1.0 / alpha)
    f = lambda s: np.exp(-t * s**alpha) * a * np.sinc(a * s / np.pi)
    inside, err = integrate.quad(f, 0.0, upper, limit=5000, epsabs=1e-14, epsrel=1e-13)
    return float(max(0.0, 1.0 - 2.0 * inside / np.pi))


# ---------------------------------------------------------------------------
# L1 moduli


def _band_limited_l1(spec, grid, noise_floor=1e-12):
    """``int |d|`` over the torus for the zero-mean function with rfft-layout
    transform samples ``spec``.

    Between consecutive sign changes the integral is a difference of the
    spectral antiderivative, which is evaluated exactly at the (linearly
    interpolated) roots.  The antiderivative is stationary at a root, so the
    root position error only enters quadratically.
    """
    N, L, dx = grid.N, grid.L, grid.dx
    d = np.fft.irfft(spec, n=N) * (N / L)
    scale = np.max(np.abs(d))
    if scale == 0.0:
        return 0.0
    nxt = np.roll(d, -1)
    size = np.maximum(np.abs(d), np.abs(nxt))
    flips = np.signbit(d) != np.signbit(nxt)
    idx = np.nonzero(flips & (size > noise_floor * scale))[0]
    if idx.size == 0:
        return float(np.sum(np.abs(d)) * dx)
    if idx.size % 2:
        # the partner sign change lies where d is at roundoff level; its
        # position hardly matters, take the quietest remaining flip
        quiet = np.nonzero(flips & (size <= noise_floor * scale))[0]
        pool = quiet if quiet.size else np.setdiff1d(np.arange(N), idx)
        idx = np.sort(np.append(idx, pool[np.argmin(size[pool])]))
    roots = (idx + d[idx] / (d[idx] - nxt[idx])) * dx
    xi = grid.rfreq()[1:-1]
    coef = spec[1:-1]
    keep = np.abs(coef) > 1e-22 * np.max(np.abs(coef))
    xi, coef = xi[keep], coef[keep]
    w = 2j * np.pi * xi
    for _ in range(3):
        # Newton polish of the interpolated roots on the exact trigonometric sum
        ph = np.exp(np.outer(roots, w))
        val = 2.0 * np.real(ph @ coef) / L + np.real(spec[0]) / L
        der = 2.0 * np.real(ph @ (coef * w)) / L
        step = np.where(der != 0, val / np.where(der != 0, der, 1.0), 0.0)
        roots = roots - np.clip(step, -dx, dx)
    ph = np.exp(np.outer(roots, w))
    F = 2.0 * np.real(ph @ (coef / w)) / L
    return float(np.sum(np.abs(np.diff(np.append(F, F[0])))))


def modulus_grid(alpha, t, t_max=None, max_shift=0.0):
    return auto_grid(alpha, t, t_max=t_max, min_half_width=4.0 * max_shift)


def l1_space_modulus(alpha: float, t: float, x, grid: GridSpec | None = None):
    """``int |p_t(y - x) - p_t(y)| dy``, shift applied as a Fourier phase.

    Vectorised over ``x``; returns a float for scalar input.
    """
    _check_alpha_t(alpha, t)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    grid = grid or modulus_grid(alpha, t, max_shift=float(np.max(np.abs(xs))))
    xi = grid.rfreq()
    base = fourier_transform(alpha, t, xi)
    out = np.empty(xs.shape)
    for i, shift in enumerate(xs):
        if shift == 0:
            out[i] = 0.0
            continue
        spec = (np.exp(-2j * np.pi * xi * shift) - 1.0) * base
        out[i] = _band_limited_l1(spec, grid)
    return float(out[0]) if np.ndim(x) == 0 else out


def l1_time_modulus(alpha: float, t: float, eps, grid: GridSpec | None = None):
    """``int |p_{t+eps}(y) - p_t(y)| dy``; vectorised over ``eps``."""
    _check_alpha_t(alpha, t)
    es = np.atleast_1d(np.asarray(eps, dtype=float))
    if np.any(es < 0):
        raise ParameterError("eps must be nonnegative")
    grid = grid or modulus_grid(alpha, t, t_max=t + float(np.max(es)))
    xi = grid.rfreq()
    lam = symbol(alpha, xi)
    base = np.exp(-t * lam)
    out = np.empty(es.shape)
    for i, e in enumerate(es):
        if e == 0:
            out[i] = 0.0
            continue
        spec = base * np.expm1(-e * lam)
        out[i] = _band_limited_l1(spec, grid)
    return float(out[0]) if np.ndim(eps) == 0 else out


def gaussian_space_modulus(t, x):
    """alpha = 2: L1 distance between N(0, 2t) and N(x, 2t) densities."""
    return 4.0 * special.ndtr(np.abs(x) / (2.0 * np.sqrt(2.0 * t))) - 2.0


def gaussian_time_modulus(t, eps):
    """alpha = 2: L1 distance between N(0, 2t) and N(0, 2(t+eps)) densities.

    The densities cross at ``+-c`` with ``c^2 = 2 a^2 b^2 log(b/a) / (b^2 - a^2)``.
    """
    eps = np.asarray(eps, dtype=float)
    a = np.sqrt(2.0 * t)
    b = np.sqrt(2.0 * (t + eps))
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.sqrt(2 * a * a * b * b * np.log(b / a) / (b * b - a * a))
        out = 4.0 * (special.ndtr(c / a) - special.ndtr(c / b))
    return np.where(eps == 0, 0.0, out)


# ---------------------------------------------------------------------------
# smoothing of Hölder functions


class HolderFunction:
    """Bounded rho-Hölder periodic test function given by a Fourier series.

    Subclasses provide ``period``, ``rho``, ``holder_constant`` and
    ``coefficients(n_max)`` returning complex ``c_n`` (n >= 0) such that
    ``w(y) = Re sum_n c_n exp(2 pi i n y / period)``.
    """

    period: float
    rho: float
    holder_constant: float

    def coefficients(self, n_max):
        raise NotImplementedError

    def smoothed(self, alpha, t, y):
        """``(p_t * w)(y)``; ``t = 0`` returns the (truncated) series of ``w``."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if t > 0:
            xi_max = (_QUAD_CUTOFF / t) ** (1.0 / alpha) / (2 * np.pi)
            n_max = int(math.ceil(xi_max * self.period)) + 1
        else:
            n_max = self.default_terms
        if n_max > 2**23:
            raise ResolutionError(f"smoothing at t={t} needs {n_max} Fourier terms", required_n=n_max)
        c = self.coefficients(n_max)
        n_max = len(c) - 1
        xi = np.arange(n_max + 1) / self.period
        damped = c * np.exp(-t * symbol(alpha, xi))
        phase = np.exp(2j * np.pi * np.outer(y, xi))
        return np.real(phase @ damped)

    default_terms = 4096


class AbsSinePower(HolderFunction):
    """``w(y) = |sin y|^rho``: rho-Hölder with constant 1, period pi.

    Cosine coefficients are exact: with ``I_n = int_0^pi sin^rho(y) cos(2ny) dy``,
    ``I_n = I_{n-1} (n - 1 - rho/2) / (n + rho/2)``.
    """

    def __init__(self, rho):
        if not (0 < rho <= 1):
            raise ParameterError(f"rho must lie in (0, 1], got {rho}")
        self.rho = rho
        self.period = math.pi
        self.holder_constant = 1.0

    def __call__(self, y):
        return np.abs(np.sin(y)) ** self.rho

    def coefficients(self, n_max):
        rho = self.rho
        n = np.arange(1, n_max + 1)
        i0 = math.sqrt(math.pi) * math.gamma((rho + 1) / 2) / math.gamma(rho / 2 + 1)
        ratios = (n - 1 - rho / 2) / (n + rho / 2)
        In = i0 * np.concatenate(([1.0], np.cumprod(ratios)))
        c = 2.0 * In / math.pi
        c[0] = i0 / math.pi
        return c.astype(complex)


class ConstantFunction(HolderFunction):
    def __init__(self, value=1.0, rho=1.0):
        self.value = float(value)
        self.rho = rho
        self.period = 1.0
        self.holder_constant = 0.0

    def __call__(self, y):
        return np.full(np.shape(y), self.value)

    def coefficients(self, n_max):
        c = np.zeros(n_max + 1, dtype=complex)
        c[0] = self.value
        return c


class SampledPeriodic(HolderFunction):
    """Test function known through equispaced samples over one period."""

    def __init__(self, samples, period, rho, holder_constant):
        samples = np.asarray(samples, dtype=float)
        if samples.ndim != 1 or samples.size < 4:
            raise InputError("need a 1-d array of at least 4 samples")
        if not np.all(np.isfinite(samples)):
            raise InputError("test function is not bounded on the grid")
        self.samples = samples
        self.period = float(period)
        self.rho = rho
        self.holder_constant = holder_constant
        self.default_terms = samples.size // 2

    def __call__(self, y):
        return np.interp(np.mod(y, self.period), np.arange(self.samples.size) * self.period / self.samples.size,
                         self.samples, period=self.period)

    def coefficients(self, n_max):
        n = self.samples.size
        c = np.fft.rfft(self.samples) / n
        c[1:] *= 2.0
        if n % 2 == 0:
            c[-1] /= 2.0
        return c[: n_max + 1]


def smoothing_space_gap(alpha, t, x, z, w: HolderFunction):
    """``|int (p_t(x - y) - p_t(z - y)) w(y) dy|``; vectorised over x and z."""
    _check_alpha_t(alpha, t)
    x, z = np.broadcast_arrays(np.atleast_1d(np.asarray(x, float)), np.atleast_1d(np.asarray(z, float)))
    vals = w.smoothed(alpha, t, np.concatenate([x, z]))
    gap = np.abs(vals[: x.size] - vals[x.size:])
    gap[x == z] = 0.0
    return gap


def smoothing_time_gap(alpha, t, delta, x, w: HolderFunction):
    """``|int (p_{t+delta}(x - y) - p_t(x - y)) w(y) dy|`` for one delta."""
    _check_alpha_t(alpha, t)
    if delta < 0:
        raise ParameterError("delta must be nonnegative")
    x = np.atleast_1d(np.asarray(x, float))
    if delta == 0:
        return np.zeros(x.shape)
    return np.abs(w.smoothed(alpha, t + delta, x) - w.smoothed(alpha, t, x))


# ---------------------------------------------------------------------------
# Riesz-weighted spectral integrals


def _check_beta(beta):
    if not (0 < beta < 1):
        raise ParameterError(f"beta must lie in (0, 1), got {beta}")


def power_weighted_laplace(beta, alpha, c, epsrel=1e-12):
    """``int_0^inf xi^{beta-1} exp(-c xi^alpha) d xi`` and an error estimate.

    The endpoint singularity is left to the algebraic-weight rule (QAWS, which
    integrates the weight exactly against Chebyshev moments); ``(1, inf)`` is
    plain adaptive quadrature.
    """
    f = lambda u: np.exp(-c * u**alpha)
    head = integrate.quad(f, 0.0, 1.0, weight="alg", wvar=(beta - 1.0, 0.0),
                          epsabs=0.0, epsrel=epsrel, limit=500, full_output=1)
    tail = integrate.quad(lambda u: u ** (beta - 1.0) * f(u), 1.0, np.inf,
                          epsabs=0.0, epsrel=epsrel, limit=500, full_output=1)
    value = head[0] + tail[0]
    err = head[1] + tail[1]
    bad = [part for part in (head, tail) if len(part) > 3]
    if bad or not np.isfinite(value) or err > 1e-8 * abs(value):
        raise NumericalError(
            f"quadrature did not converge for alpha={alpha}, beta={beta}, c={c}",
            {"alpha": alpha, "beta": beta, "c": c, "value": value, "abserr": err,
             "messages": [part[3] for part in bad]})
    return value, err


def riesz_smoothed_closed_form(alpha, beta, t):
    return 2.0 * math.gamma(beta / alpha) / (alpha * ((2 * math.pi) ** alpha * t) ** (beta / alpha))


def riesz_smoothed_at_zero(alpha: float, beta: float, t: float) -> float:
    """``(p_t * f_beta)(0) = int |xi|^{beta-1} exp(-t (2 pi |xi|)^alpha) d xi`` by quadrature."""
    _check_alpha_t(alpha, t)
    _check_beta(beta)
    value, _ = power_weighted_laplace(beta, alpha, t * (2 * math.pi) ** alpha)
    return 2.0 * value


@dataclass
class EnergyComparison:
    alpha: float
    beta: float
    t: float
    quadrature: float
    closed_form: float
    rel_err: float

    def to_record(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "t": self.t, "quadrature": self.quadrature,
                "closed_form": self.closed_form, "rel_err": self.rel_err}


def weighted_transform_energy(alpha: float, beta: float, t: float) -> EnergyComparison:
    """``int g_{1-beta}(xi) |F p_t(xi)|^2 d xi`` by quadrature next to
    ``2 Gamma(beta/alpha) / (alpha (2^{alpha+1} pi^alpha t)^{beta/alpha})``."""
    _check_alpha_t(alpha, t)
    _check_beta(beta)
    quad, _ = power_weighted_laplace(beta, alpha, 2.0 * t * (2 * math.pi) ** alpha)
    quad *= 2.0
    closed = 2.0 * math.gamma(beta / alpha) / (
        alpha * (2 ** (alpha + 1) * math.pi**alpha * t) ** (beta / alpha))
    return EnergyComparison(alpha, beta, t, quad, closed, abs(quad - closed) / closed)
