"""Zero-point background spectrum, incoherent-field statistics and the Planck law.

The thermal mean energy of a mode is obtained by integrating the fluctuation
relation ``dE/dmu = E**2 + 2*E*E_B`` with ``mu = -1/(kappa*T)`` and
``E_B = hbar*omega/2``; the closed form is used only as a check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvariantViolation
from .numerics import Grid1D, ode_solve, trapezoid_integrate

# Wien-tail starting point for the mu integration; exp(-30) ~ 1e-13 relative.
WIEN_START = 30.0


@dataclass(frozen=True)
class SpectralMode:
    omega: float
    hbar: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        for name in ("omega", "hbar", "kappa"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")

    @property
    def quantum(self) -> float:
        return self.hbar * self.omega


@dataclass(frozen=True)
class ThermalState:
    mode: SpectralMode
    T: float

    def __post_init__(self):
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ValueError(f"temperature must be positive, got {self.T!r}")

    @property
    def mu(self) -> float:
        return -1.0 / (self.mode.kappa * self.T)

    @property
    def x(self) -> float:
        """hbar*omega/(kappa*T)."""
        return self.mode.quantum / (self.mode.kappa * self.T)


@dataclass(frozen=True)
class FieldStats:
    """Mean and mean-square deviation of a field's energy density."""

    mean: float
    variance: float

    def __post_init__(self):
        if self.variance < 0:
            raise InvariantViolation(f"negative variance {self.variance!r}")

    @classmethod
    def chaotic(cls, mean: float) -> "FieldStats":
        return cls(mean, mean * mean)

    @property
    def mean_square(self) -> float:
        return self.variance + self.mean * self.mean

    @property
    def is_chaotic(self) -> bool:
        return math.isclose(self.variance, self.mean * self.mean, rel_tol=1e-12, abs_tol=1e-300)


@dataclass(frozen=True)
class BoostParams:
    beta: float

    def __post_init__(self):
        if not abs(self.beta) < 1:
            raise ValueError(f"|beta| must be < 1, got {self.beta!r}")

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt((1.0 - self.beta) * (1.0 + self.beta))


def background_energy(mode: SpectralMode) -> float:
    return 0.5 * mode.hbar * mode.omega


def combine_incoherent(s1: FieldStats, s2: FieldStats) -> FieldStats:
    """Means add, and for mutually incoherent fields so do the variances."""
    for s in (s1, s2):
        if s.variance < 0:
            raise InvariantViolation(f"negative variance {s.variance!r}")
    return FieldStats(s1.mean + s2.mean, s1.variance + s2.variance)


def total_fluctuation(E_T: float, E_B: float) -> float:
    if E_T < 0 or E_B < 0:
        raise ValueError("energies must be non-negative")
    return E_T * E_T + 2.0 * E_T * E_B


def fluctuation_decomposition(E_T: float, E_B: float) -> tuple[float, float]:
    """Relative variance split as (wave_term, particle_term) = (1, 2*E_B/E_T)."""
    if E_T == 0:
        raise ZeroDivisionError("relative fluctuation undefined for E_T = 0")
    if E_T < 0:
        raise ValueError("E_T must be positive")
    return 1.0, 2.0 * E_B / E_T


def planck_energy(mode: SpectralMode, T: float) -> float:
    x = mode.quantum / (mode.kappa * T)
    return mode.quantum / math.expm1(x)


def solve_thermal_ode(mode: SpectralMode, T_targets: Sequence[float], tol: float = 1e-8) -> list[float]:
    """Thermal mean energy at each temperature by integrating the fluctuation ODE in mu."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    temps = [float(T) for T in T_targets]
    if any(not (T > 0) for T in temps):
        raise ValueError("temperatures must be positive")
    if not temps:
        return []
    hw = mode.quantum
    E_B = background_energy(mode)
    mus = np.array([-1.0 / (mode.kappa * T) for T in temps])
    x_start = max(WIEN_START, float(np.max(-mus * hw)))
    mu0 = -x_start / hw
    E0 = hw * math.exp(-x_start)

    order = np.argsort(mus, kind="stable")
    # local relative errors grow by up to ~1/(1 - exp(-x_min)) on the way up
    sol = ode_solve(
        lambda mu, E: E * E + 2.0 * E * E_B,
        E0,
        (mu0, float(mus[order[-1]])),
        tol * 1e-3,
        atol=0.0,
        t_eval=[float(mus[i]) for i in order],
    )
    out = np.empty(len(temps))
    out[order] = sol.y
    return [float(v) for v in out]


def spectrum_invariance_residual(
    spectral_exponent: float,
    boost: BoostParams,
    direction_cosine: float,
    band: tuple[float, float] = (1.0, 10.0),
    n_sub: int = 8,
    n_quad: int = 257,
) -> float:
    """Largest relative band-energy change of I(w) ~ w**s under a boost.

    Uses the Doppler factor ``D = gamma*(1 - beta*cos)`` and the invariance of
    I(w)/w**3, so the boosted spectrum is ``D**3 * I(w/D)``. The comparison is
    made over ``n_sub`` log-spaced sub-bands of ``band``.
    """
    if abs(direction_cosine) > 1:
        raise ValueError("direction cosine must lie in [-1, 1]")
    s = float(spectral_exponent)
    D = boost.gamma * (1.0 - boost.beta * direction_cosine)
    edges = np.geomspace(band[0], band[1], n_sub + 1)
    worst = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        g = Grid1D.from_bounds(lo, hi, n_quad)
        w = g.coords
        rest = trapezoid_integrate(w**s, g)
        boosted = trapezoid_integrate(D**3 * (w / D) ** s, g)
        worst = max(worst, abs(boosted - rest) / rest)
    return worst
