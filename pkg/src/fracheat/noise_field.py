"""Space-time Gaussian noise, white in time and Riesz-colored in space.

The spatial covariance is ``f_beta(x) = c_{1-beta} |x|^{-beta}``, whose
spectral density is ``|xi|^{beta-1}``.  On the torus of length ``L`` an
increment over a step ``dt`` is

    dW(x) = sum_k a_k exp(2 pi i k x / L),   E|a_k|^2 = dt * w_k,
    w_k = |k/L|^{beta-1} / L,

so that ``E dW(x) dW(y) = dt * sum_k w_k exp(2 pi i k (x-y)/L)``, a Riemann sum
of the continuum covariance.  The ``k = 0`` weight is infinite in the
continuum and is set by the zero-mode rule.

Random numbers come from Philox keyed by ``(seed_base, stream_id)`` with the
step index in the counter, so every increment can be regenerated on its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import InputError, ParameterError
from .grid import GridSpec

DEFAULT_SEED = 20170412
_MASK64 = (1 << 64) - 1


def riesz_constant(beta: float) -> float:
    """``c_beta = 2 sin(beta pi / 2) Gamma(1 - beta) / (2 pi)^{1 - beta}``."""
    if not (0 < beta < 1):
        raise ParameterError(f"beta must lie in (0, 1), got {beta}")
    return 2.0 * math.sin(beta * math.pi / 2) * math.gamma(1 - beta) / (2 * math.pi) ** (1 - beta)


def riesz_kernel_value(beta: float, x):
    """``f_beta(x) = c_{1-beta} |x|^{-beta}``; raises at ``x = 0`` where it is infinite."""
    if not (0 < beta < 1):
        raise ParameterError(f"beta must lie in (0, 1), got {beta}")
    c = riesz_constant(1.0 - beta)
    x = np.asarray(x, dtype=float)
    if np.any(x == 0):
        raise ParameterError("Riesz kernel is singular at x = 0")
    out = c * np.abs(x) ** (-beta)
    return float(out) if out.ndim == 0 else out


def riesz_spectral_density(beta: float, xi):
    """``|xi|^{beta-1}``.  Accepts ``beta = 1`` (white-noise limit, flat) for diagnostics."""
    if not (0 < beta <= 1):
        raise ParameterError(f"beta must lie in (0, 1], got {beta}")
    xi = np.abs(np.asarray(xi, dtype=float))
    with np.errstate(divide="ignore"):
        return xi ** (beta - 1.0)


def compensated_zero_mode(beta: float, L: float) -> float:
    """Zero-mode weight cancelling the constant offset of the torus covariance.

    With the zero mode dropped, ``sum_{k != 0} w_k cos(2 pi k x / L)`` equals
    ``f_beta(x) + 2 zeta(1 - beta) L^{-beta} + O((x/L)^2)``; the constant is
    negative, so a finite zero-mode weight of the opposite sign removes it.
    """
    if not (0 < beta < 1):
        raise ParameterError(f"beta must lie in (0, 1), got {beta}")
    return float(-2.0 * special.zeta(1.0 - beta) * L ** (-beta))


@dataclass(frozen=True)
class NoiseSpec:
    beta: float
    grid: GridSpec
    dt: float
    seed_base: int = DEFAULT_SEED
    zero_mode: str | float = "drop"

    def __post_init__(self):
        if not (0 < self.beta < 1):
            raise ParameterError(f"beta must lie in (0, 1), got {self.beta}")
        if not self.dt > 0:
            raise ParameterError(f"dt must be positive, got {self.dt}")
        if not (0 <= int(self.seed_base) <= _MASK64):
            raise ParameterError("seed_base must be an unsigned 64-bit integer")
        if isinstance(self.zero_mode, str):
            if self.zero_mode != "drop":
                raise ParameterError(f"unknown zero-mode rule {self.zero_mode!r}")
        elif not (np.isfinite(self.zero_mode) and self.zero_mode >= 0):
            raise ParameterError("finite zero-mode weight must be nonnegative")


def _zero_weight(zero_mode):
    return 0.0 if isinstance(zero_mode, str) else float(zero_mode)


def spectral_weights(spec: NoiseSpec) -> np.ndarray:
    """Per-mode variance ``w_k`` (per unit time) in ``np.fft.fftfreq`` order."""
    xi = spec.grid.freq()
    w = np.empty(spec.grid.N)
    w[1:] = riesz_spectral_density(spec.beta, xi[1:]) / spec.grid.L
    w[0] = _zero_weight(spec.zero_mode)
    return w


def _rfft_amplitude(spec: NoiseSpec) -> np.ndarray:
    """Filter applied to ``rfft`` of white noise: ``sqrt(N dt w_k)``."""
    N = spec.grid.N
    xi = spec.grid.rfreq()
    w = np.empty(xi.size)
    w[1:] = riesz_spectral_density(spec.beta, xi[1:]) / spec.grid.L
    w[0] = _zero_weight(spec.zero_mode)
    return np.sqrt(N * spec.dt * w)


def covariance_from_weights(spec: NoiseSpec) -> np.ndarray:
    """Exact covariance ``E dW(0) dW(j dx)`` of the sampled field, natural order."""
    return spec.dt * np.real(np.fft.fft(spectral_weights(spec)))


def stream_generator(seed_base: int, stream_id: int, step_index: int) -> np.random.Generator:
    """Counter-based generator for one (seed, stream, step) coordinate."""
    key = [int(seed_base) & _MASK64, int(stream_id) & _MASK64]
    return np.random.Generator(np.random.Philox(key=key, counter=[0, int(step_index), 0, 0]))


def white_block(seed_base, stream_ids, step_index, n) -> np.ndarray:
    """Standard normals, one row of length ``n`` per stream."""
    out = np.empty((len(stream_ids), n))
    for row, sid in enumerate(stream_ids):
        out[row] = stream_generator(seed_base, sid, step_index).standard_normal(n)
    return out


@dataclass(eq=False)
class NoiseIncrement:
    values: np.ndarray
    step_index: int
    stream_id: int


class IncrementSampler:
    """Reusable sampler; holds the filter so repeated draws skip its setup."""

    def __init__(self, spec: NoiseSpec):
        self.spec = spec
        self.amplitude = _rfft_amplitude(spec)

    def spectrum(self, stream_ids, step_index) -> np.ndarray:
        """rfft of the increments for several streams at one step."""
        z = white_block(self.spec.seed_base, stream_ids, step_index, self.spec.grid.N)
        return np.fft.rfft(z, axis=-1) * self.amplitude

    def fields(self, stream_ids, step_index) -> np.ndarray:
        return np.fft.irfft(self.spectrum(stream_ids, step_index), n=self.spec.grid.N, axis=-1)


def sample_increment(spec: NoiseSpec, stream_id: int, step_index: int) -> NoiseIncrement:
    values = IncrementSampler(spec).fields([stream_id], step_index)[0]
    return NoiseIncrement(values, int(step_index), int(stream_id))


@dataclass
class CovarianceEstimate:
    lag: float
    estimate: float
    stderr: float
    draws: int


def _as_matrix(increments) -> np.ndarray:
    if isinstance(increments, np.ndarray):
        arr = np.atleast_2d(increments)
    else:
        increments = list(increments)
        if not increments:
            raise InputError("no increments given")
        arr = np.stack([inc.values if isinstance(inc, NoiseIncrement) else np.asarray(inc)
                        for inc in increments])
    if arr.shape[0] < 2:
        raise InputError("need at least two increments for a covariance estimate")
    return arr


def empirical_covariance(increments, lag: float, grid: GridSpec) -> CovarianceEstimate:
    """Mean of ``dW(x) dW(x + lag)`` over positions and draws, with the standard
    error over draws.  The population mean is zero, so no centring is done;
    ``lag`` and ``-lag`` give identical results."""
    arr = _as_matrix(increments)
    j = abs(grid.lag_index(lag))
    per_draw = np.mean(arr * np.roll(arr, -j, axis=1), axis=1)
    n = per_draw.size
    return CovarianceEstimate(float(lag), float(np.mean(per_draw)),
                              float(np.std(per_draw, ddof=1) / math.sqrt(n)), n)


def covariance_report(spec: NoiseSpec, lags, draws: int, stream_id: int = 0,
                      chunk: int = 2000) -> dict:
    """Monte Carlo covariance at the given lags against ``dt f_beta(lag)``.

    Draws are the steps ``0..draws-1`` of one stream.
    """
    sampler = IncrementSampler(spec)
    grid = spec.grid
    shifts = [abs(grid.lag_index(l)) for l in lags]
    per_draw = [[] for _ in lags]
    for start in range(0, draws, chunk):
        steps = range(start, min(draws, start + chunk))
        block = np.stack([sampler.fields([stream_id], s)[0] for s in steps])
        for i, j in enumerate(shifts):
            per_draw[i].append(np.mean(block * np.roll(block, -j, axis=1), axis=1))
    est, err = [], []
    for vals in per_draw:
        v = np.concatenate(vals)
        est.append(float(np.mean(v)))
        err.append(float(np.std(v, ddof=1) / math.sqrt(v.size)))
    target = [float(spec.dt * riesz_kernel_value(spec.beta, l)) for l in lags]
    exact = covariance_from_weights(spec)
    return {
        "beta": spec.beta,
        "dt": spec.dt,
        "draws": draws,
        "zero_mode": spec.zero_mode,
        "lags": [float(l) for l in lags],
        "estimate": est,
        "target": target,
        "stderr": err,
        "grid_covariance": [float(exact[j]) for j in shifts],
        "valid_lag_window": [4 * grid.dx, grid.L / 8],
    }
