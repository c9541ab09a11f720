"""Periodic spatial grid and time stepping parameters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class GridSpec:
    """Torus of length ``L`` sampled at ``N`` equispaced points, plus optional
    time step ``dt`` and horizon ``T``.

    Solver arrays are stored in natural order, ``x_j = j * dx`` for
    ``j = 0..N-1``.  Kernel tables use the centred layout returned by
    :meth:`centered_x`.
    """

    L: float
    N: int
    dt: float | None = None
    T: float | None = None

    def __post_init__(self):
        if not (np.isfinite(self.L) and self.L > 0):
            raise ParameterError(f"grid length L must be positive, got {self.L}")
        if int(self.N) != self.N or self.N < 2 or self.N % 2:
            raise ParameterError(f"grid size N must be an even integer >= 2, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        if self.dt is not None and not self.dt > 0:
            raise ParameterError(f"time step dt must be positive, got {self.dt}")
        if self.T is not None and not self.T >= 0:
            raise ParameterError(f"horizon T must be nonnegative, got {self.T}")

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def n_steps(self) -> int:
        if self.dt is None or self.T is None:
            raise ParameterError("grid has no time discretisation")
        return steps_for(self.T, self.dt)

    def x(self) -> np.ndarray:
        return np.arange(self.N) * self.dx

    def centered_x(self) -> np.ndarray:
        """Abscissae ``(j - N/2) dx``; every point except ``-L/2`` has its mirror."""
        return (np.arange(self.N) - self.N // 2) * self.dx

    def rfreq(self) -> np.ndarray:
        """Nonnegative frequencies k/L (cycles per unit length), rfft layout."""
        return np.arange(self.N // 2 + 1) / self.L

    def freq(self) -> np.ndarray:
        return np.fft.fftfreq(self.N, d=self.dx)

    def lag_index(self, lag: float) -> int:
        """Integer shift for a physical lag; the lag must be a grid multiple."""
        m = lag / self.dx
        j = int(round(m))
        if abs(m - j) > 1e-9 * max(1.0, abs(m)):
            raise ParameterError(f"lag {lag} is not a multiple of dx={self.dx}")
        return j

    def to_dict(self) -> dict:
        return {"L": self.L, "N": self.N, "dt": self.dt, "T": self.T}


def steps_for(t: float, dt: float) -> int:
    """Number of whole steps of size dt reaching time t; t must be a multiple of dt."""
    m = t / dt
    n = int(round(m))
    if abs(m - n) > 1e-9 * max(1.0, m):
        raise ParameterError(f"time {t} is not a multiple of dt={dt}")
    return n
