"""Exponential-Euler integration of the mild solution on the torus.

One step in Fourier space reads

    u_hat(n+1) = exp(-dt lambda_k) * (u_hat(n) + FFT[sigma(u(n)) dW(n)]),
    lambda_k = (2 pi |k| / L)^alpha,

so the linear flow is exact and the stochastic convolution is discretised
explicitly.  Paths are stepped in batches; each row of a batch only sees its
own noise stream, and FFTs act on rows independently, so a path's trajectory
does not depend on how paths are grouped or scheduled.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import heat_kernel
from .errors import BlowUpError, ParameterError, ResolutionError, UsageError
from .grid import GridSpec, steps_for
from .noise_field import DEFAULT_SEED, IncrementSampler, NoiseSpec, spectral_weights

log = logging.getLogger(__name__)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
SIGMA_KINDS = ("zero", "constant", "identity", "affine", "sine")
PHI_KINDS = ("constant", "sinusoid", "rough_holder")


@dataclass(frozen=True)
class Sigma:
    """Nonlinearity: zero, constant(value), identity, affine(a u + b) or sin(u)."""

    kind: str = "constant"
    value: float = 1.0
    a: float = 1.0
    b: float = 0.0

    def __post_init__(self):
        if self.kind not in SIGMA_KINDS:
            raise ParameterError(f"unknown sigma kind {self.kind!r}; expected one of {SIGMA_KINDS}")

    @property
    def additive(self) -> bool:
        return self.kind in ("zero", "constant")

    @property
    def level(self) -> float:
        """Noise amplitude for additive kinds."""
        if self.kind == "zero":
            return 0.0
        if self.kind == "constant":
            return self.value
        raise UsageError(f"sigma kind {self.kind!r} is not additive")

    def natural_bound(self) -> float:
        """Smallest K with |s(x)-s(y)| <= K|x-y| and |s(x)| <= K(1+|x|)."""
        return {"zero": 0.0, "constant": abs(self.value), "identity": 1.0,
                "affine": max(abs(self.a), abs(self.b)), "sine": 1.0}[self.kind]

    def __call__(self, u):
        if self.kind == "zero":
            return np.zeros_like(u)
        if self.kind == "constant":
            return np.full_like(u, self.value)
        if self.kind == "identity":
            return u
        if self.kind == "affine":
            return self.a * u + self.b
        return np.sin(u)

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "constant":
            d["value"] = self.value
        elif self.kind == "affine":
            d.update(a=self.a, b=self.b)
        return d


def spot_check_sigma(sigma: Sigma, K: float, samples: int = 256, seed: int = 0) -> bool:
    """Check the Lipschitz and linear-growth conditions on random pairs."""
    rng = np.random.default_rng(seed)
    x, y = rng.normal(scale=10.0, size=(2, samples))
    sx, sy = sigma(x), sigma(y)
    tol = 1e-12 * (1 + K) * (1 + np.abs(x) + np.abs(y))
    lip = np.all(np.abs(sx - sy) <= K * np.abs(x - y) + tol)
    growth = np.all(np.abs(sx) <= K * (1 + np.abs(x)) + tol)
    return bool(lip and growth)


@dataclass(frozen=True)
class InitialCondition:
    """constant(value), sinusoid(amplitude, mode) or rough_holder(rho).

    rough_holder is the lacunary series ``sum_j 2^{-rho j} cos(2 pi 2^j x / L + theta_j)``
    over ``2^j < N/2`` with ``theta_j = 2 pi frac(j g)``, g the golden ratio
    conjugate, unless explicit phases are given.
    """

    kind: str = "constant"
    value: float = 0.0
    amplitude: float = 1.0
    mode: int = 1
    rho: float = 0.5
    phases: tuple | None = None

    def __post_init__(self):
        if self.kind not in PHI_KINDS:
            raise ParameterError(f"unknown phi kind {self.kind!r}; expected one of {PHI_KINDS}")
        if self.kind == "rough_holder" and not (0 < self.rho <= 1):
            raise ParameterError(f"rough_holder index must lie in (0, 1], got {self.rho}")

    def phase_list(self, n_terms: int) -> list[float]:
        if self.phases is not None:
            if len(self.phases) < n_terms:
                raise ParameterError(f"need {n_terms} phases, got {len(self.phases)}")
            return [float(p) for p in self.phases[:n_terms]]
        return [2 * math.pi * ((j * GOLDEN) % 1.0) for j in range(n_terms)]

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "constant":
            d["value"] = self.value
        elif self.kind == "sinusoid":
            d.update(amplitude=self.amplitude, mode=self.mode)
        else:
            d["rho"] = self.rho
            if self.phases is not None:
                d["phases"] = list(self.phases)
        return d


@dataclass(frozen=True)
class ModelSpec:
    alpha: float
    beta: float
    sigma: Sigma = Sigma()
    phi: InitialCondition = InitialCondition()
    K: float | None = None
    rho: float = 1.0

    def __post_init__(self):
        if not (1 < self.alpha <= 2):
            raise ParameterError(f"alpha must lie in (1, 2], got {self.alpha}")
        if not (0 < self.beta < 1):
            raise ParameterError(f"beta must lie in (0, 1), got {self.beta}")
        if not (0 < self.rho <= 1):
            raise ParameterError(f"rho must lie in (0, 1], got {self.rho}")
        if self.K is None:
            object.__setattr__(self, "K", self.sigma.natural_bound())
        if not spot_check_sigma(self.sigma, self.K):
            raise ParameterError(f"sigma {self.sigma.kind} violates the declared bound K={self.K}")

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "sigma": self.sigma.to_dict(),
                "phi": self.phi.to_dict(), "K": self.K, "rho": self.rho}


@dataclass(frozen=True)
class SolverConfig:
    grid: GridSpec
    snapshot_times: tuple = ()
    seed_base: int = DEFAULT_SEED
    path_count: int = 1
    zero_mode: str | float = "drop"
    dealias: bool = False
    workers: int = 1
    strict_torus: bool = False
    torus_tol: float = 1e-10

    def __post_init__(self):
        g = self.grid
        if g.dt is None or g.T is None:
            raise ParameterError("solver grid needs dt and T")
        if g.N & (g.N - 1):
            raise ParameterError(f"N must be a power of two, got {g.N}")
        steps_for(g.T, g.dt)
        times = tuple(float(s) for s in self.snapshot_times) or (float(g.T),)
        if list(times) != sorted(set(times)):
            raise ParameterError("snapshot times must be strictly increasing")
        if times[0] < 0 or times[-1] > g.T * (1 + 1e-12):
            raise ParameterError(f"snapshot times must lie in [0, T={g.T}]")
        for s in times:
            steps_for(s, g.dt)
        object.__setattr__(self, "snapshot_times", times)
        if self.path_count < 1:
            raise ParameterError("path_count must be at least 1")
        if self.workers < 1:
            raise ParameterError("workers must be at least 1")

    @property
    def snapshot_steps(self) -> tuple:
        return tuple(steps_for(s, self.grid.dt) for s in self.snapshot_times)

    def noise_spec(self, beta) -> NoiseSpec:
        return NoiseSpec(beta, self.grid, self.grid.dt, self.seed_base, self.zero_mode)

    def to_dict(self) -> dict:
        return {"grid": self.grid.to_dict(), "snapshot_times": list(self.snapshot_times),
                "seed_base": self.seed_base, "path_count": self.path_count,
                "zero_mode": self.zero_mode, "dealias": self.dealias, "workers": self.workers,
                "strict_torus": self.strict_torus, "torus_tol": self.torus_tol}


@dataclass(eq=False)
class FieldSnapshot:
    t: float
    values: np.ndarray


@dataclass(eq=False)
class PathState:
    t_index: int
    field: FieldSnapshot
    stream_id: int


@dataclass(eq=False)
class Ensemble:
    """Snapshots of many paths: ``fields[path, time, x]``."""

    times: np.ndarray
    fields: np.ndarray
    stream_ids: tuple
    grid: GridSpec
    diagnostics: dict = field(default_factory=dict)

    def at(self, t) -> np.ndarray:
        i = int(np.argmin(np.abs(self.times - t)))
        if not math.isclose(self.times[i], t, rel_tol=1e-9, abs_tol=1e-12):
            from .errors import InputError
            raise InputError(f"no snapshot at t={t}")
        return self.fields[:, i, :]


def make_initial(phi: InitialCondition, grid: GridSpec) -> FieldSnapshot:
    x = grid.x()
    if phi.kind == "constant":
        values = np.full(grid.N, float(phi.value))
    elif phi.kind == "sinusoid":
        values = phi.amplitude * np.cos(2 * np.pi * phi.mode * x / grid.L)
    else:
        n_terms = int(math.log2(grid.N // 2))  # 2^j < N/2
        phases = phi.phase_list(n_terms)
        values = np.zeros(grid.N)
        for j in range(n_terms):
            values += 2.0 ** (-phi.rho * j) * np.cos(2 * np.pi * 2**j * x / grid.L + phases[j])
    if not np.all(np.isfinite(values)):
        raise ParameterError("initial condition is not bounded on the grid")
    return FieldSnapshot(0.0, values)


def torus_leak(model: ModelSpec, config: SolverConfig) -> float:
    """Mass of ``p_T`` outside ``[-L/4, L/4]``: the domain-truncation proxy."""
    g = config.grid
    if g.T == 0:
        return 0.0
    return heat_kernel.kernel_mass_outside(model.alpha, g.T, g.L / 4)


def check_torus(model, config) -> dict:
    leak = torus_leak(model, config)
    ok = leak < config.torus_tol
    if not ok:
        msg = (f"kernel mass outside [-L/4, L/4] at T={config.grid.T} is {leak:.3g} "
               f"(tolerance {config.torus_tol:g}); torus effects are not negligible")
        if config.strict_torus:
            raise ResolutionError(msg, required_l=None)
        log.warning(msg)
    return {"torus_leak": leak, "torus_tol": config.torus_tol, "torus_ok": ok}


class _Stepper:
    def __init__(self, model: ModelSpec, config: SolverConfig):
        g = config.grid
        self.model = model
        self.config = config
        self.N = g.N
        lam = heat_kernel.symbol(model.alpha, g.rfreq())
        self.decay = np.exp(-g.dt * lam)
        self.sampler = IncrementSampler(config.noise_spec(model.beta))
        self.mask = None
        if config.dealias:
            k = np.arange(g.N // 2 + 1)
            self.mask = (k <= g.N // 3).astype(float)

    def step(self, u, stream_ids, step_index):
        sigma = self.model.sigma
        uhat = np.fft.rfft(u, axis=-1)
        if sigma.kind == "constant":
            uhat = uhat + sigma.value * self.sampler.spectrum(stream_ids, step_index)
        elif sigma.kind != "zero":
            dw = self.sampler.fields(stream_ids, step_index)
            forcing = np.fft.rfft(sigma(u) * dw, axis=-1)
            if self.mask is not None:
                forcing *= self.mask
            uhat = uhat + forcing
        return np.fft.irfft(uhat * self.decay, n=self.N, axis=-1)


@lru_cache(maxsize=8)
def _stepper(model, config):
    return _Stepper(model, config)


def evolve_step(state: PathState, model: ModelSpec, config: SolverConfig) -> PathState:
    """Advance one path by one step of size ``dt``."""
    u = np.asarray(state.field.values, dtype=float)[None, :]
    if not np.all(np.isfinite(u)):
        raise BlowUpError(f"non-finite field at step {state.t_index} (stream {state.stream_id})",
                          state.t_index, state.stream_id)
    new = _stepper(model, config).step(u, [state.stream_id], state.t_index)[0]
    n = state.t_index + 1
    if not np.all(np.isfinite(new)):
        raise BlowUpError(f"non-finite field at step {n} (stream {state.stream_id})", n, state.stream_id)
    return PathState(n, FieldSnapshot(n * config.grid.dt, new), state.stream_id)


def _run_batch(model, config, stream_ids):
    stepper = _stepper(model, config)
    u0 = make_initial(model.phi, config.grid).values
    u = np.tile(u0, (len(stream_ids), 1))
    wanted = config.snapshot_steps
    out = np.empty((len(stream_ids), len(wanted), config.grid.N))
    slot = 0
    n = 0
    while slot < len(wanted):
        while slot < len(wanted) and wanted[slot] == n:
            out[:, slot, :] = u
            slot += 1
        if slot == len(wanted):
            break
        u = stepper.step(u, stream_ids, n)
        n += 1
        bad = ~np.all(np.isfinite(u), axis=1)
        if bad.any():
            sid = stream_ids[int(np.argmax(bad))]
            raise BlowUpError(f"non-finite field at step {n} (stream {sid})", n, sid)
    return out


def simulate_ensemble(model: ModelSpec, config: SolverConfig, stream_ids=None,
                      workers: int | None = None, batch: int = 256) -> Ensemble:
    """Simulate many paths; results are identical for any ``workers``/``batch``."""
    diag = check_torus(model, config)
    ids = tuple(range(config.path_count)) if stream_ids is None else tuple(int(s) for s in stream_ids)
    chunks = [ids[i:i + batch] for i in range(0, len(ids), batch)]
    workers = config.workers if workers is None else workers
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _run_batch(model, config, c), chunks))
    else:
        parts = [_run_batch(model, config, c) for c in chunks]
    fields = np.concatenate(parts, axis=0)
    return Ensemble(np.array(config.snapshot_times), fields, ids, config.grid, diag)


def simulate_path(model: ModelSpec, config: SolverConfig, stream_id: int = 0) -> list[FieldSnapshot]:
    ens = simulate_ensemble(model, config, [stream_id], workers=1)
    return [FieldSnapshot(float(t), ens.fields[0, i].copy()) for i, t in enumerate(ens.times)]


def semigroup(values, alpha, t, grid: GridSpec) -> np.ndarray:
    """Deterministic fractional heat flow on the torus (spectral multiplier)."""
    lam = heat_kernel.symbol(alpha, grid.rfreq())
    return np.fft.irfft(np.fft.rfft(values) * np.exp(-t * lam), n=grid.N)


# ---------------------------------------------------------------------------
# Gaussian oracle for additive noise


def _mode_variance(model, config, t, law):
    """``E|u_hat_k(t)|^2`` for the random part, rfft layout."""
    g = config.grid
    level = model.sigma.level
    w = spectral_weights(config.noise_spec(model.beta))[: g.N // 2 + 1]
    lam = heat_kernel.symbol(model.alpha, g.rfreq())
    var = np.empty_like(lam)
    pos = lam > 0
    if law == "continuous":
        var[pos] = w[pos] * -np.expm1(-2 * t * lam[pos]) / (2 * lam[pos])
        var[~pos] = w[~pos] * t
    elif law == "scheme":
        n = steps_for(t, g.dt)
        r = np.exp(-2 * g.dt * lam[pos])
        var[pos] = w[pos] * g.dt * r * -np.expm1(n * np.log(r)) / -np.expm1(-2 * g.dt * lam[pos])
        var[~pos] = w[~pos] * g.dt * n
    else:
        raise UsageError(f"unknown law {law!r}; use 'continuous' or 'scheme'")
    return level**2 * var


def _multiplicity(N):
    m = np.full(N // 2 + 1, 2.0)
    m[0] = 1.0
    m[-1] = 1.0
    return m


def _require_additive(model):
    if not model.sigma.additive:
        raise UsageError("the Gaussian oracle needs additive noise (sigma zero or constant)")


def gaussian_oracle_structure(model: ModelSpec, config: SolverConfig, t: float, lags,
                              law: str = "continuous"):
    """Exact ``E|u(t, x+h) - u(t, x)|^2`` averaged over x, for additive noise.

    ``law='continuous'`` uses the mode variance ``q (1 - exp(-2 t lambda)) / (2 lambda)``
    of the time-continuous equation; ``law='scheme'`` the geometric sum produced
    by the exponential-Euler recursion with the configured dt.
    """
    from .holder_estimator import MomentTable

    _require_additive(model)
    g = config.grid
    lags = np.asarray(lags, dtype=float)
    var = _mode_variance(model, config, t, law) * _multiplicity(g.N)
    xi = g.rfreq()
    mean = semigroup(make_initial(model.phi, g).values, model.alpha, t, g)
    out = np.empty(lags.size)
    for i, h in enumerate(lags):
        j = g.lag_index(h)
        det = np.mean((np.roll(mean, -j) - mean) ** 2)
        out[i] = np.sum(2.0 * (1.0 - np.cos(2 * np.pi * xi * h)) * var) + det
    return MomentTable("space", 2, lags, out, np.zeros_like(out))


def gaussian_oracle_temporal(model: ModelSpec, config: SolverConfig, t: float, lags,
                             law: str = "continuous"):
    """Exact ``E|u(t+delta, x) - u(t, x)|^2`` averaged over x, for additive noise."""
    from .holder_estimator import MomentTable

    _require_additive(model)
    g = config.grid
    lags = np.asarray(lags, dtype=float)
    mult = _multiplicity(g.N)
    lam = heat_kernel.symbol(model.alpha, g.rfreq())
    v0 = _mode_variance(model, config, t, law)
    phi0 = make_initial(model.phi, g).values
    m0 = semigroup(phi0, model.alpha, t, g)
    out = np.empty(lags.size)
    for i, d in enumerate(lags):
        v1 = _mode_variance(model, config, t + d, law)
        rand = np.sum(mult * (v1 + v0 - 2.0 * np.exp(-d * lam) * v0))
        det = np.mean((semigroup(phi0, model.alpha, t + d, g) - m0) ** 2)
        out[i] = rand + det
    return MomentTable("time", 2, lags, out, np.zeros_like(out))
