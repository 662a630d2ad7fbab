"""Boosted standing waves, the modulation wavevector and relativistic bookkeeping.

A rest-frame standing wave ``2 cos(k0 x) sin(w0 t)`` seen from a frame moving
at ``v = beta*c`` becomes a carrier ``cos(gamma*k0*(x - v t))`` times a
modulation ``sin(gamma*beta*k0*(c**2 t/v - x))``. All wavevectors here are
angular (``lambda = 2*pi/k``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvariantViolation
from .spectrum import BoostParams


@dataclass(frozen=True)
class RestFrameOscillator:
    """Particle in equilibrium with the background mode at ``omega0``: m0 c^2 = hbar omega0."""

    m0: float
    omega0: float
    c: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("m0", "omega0", "c", "hbar"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive, got {v!r}")
        rest = self.m0 * self.c**2
        if abs(rest - self.hbar * self.omega0) > 1e-12 * rest:
            raise InvariantViolation(
                f"rest energy m0*c^2 = {rest!r} differs from hbar*omega0 = {self.hbar * self.omega0!r}"
            )

    @classmethod
    def from_omega(cls, omega0: float, c: float = 1.0, hbar: float = 1.0) -> "RestFrameOscillator":
        return cls(hbar * omega0 / c**2, omega0, c, hbar)

    @classmethod
    def from_mass(cls, m0: float, c: float = 1.0, hbar: float = 1.0) -> "RestFrameOscillator":
        return cls(m0, m0 * c**2 / hbar, c, hbar)

    @property
    def k0(self) -> float:
        return self.omega0 / self.c


@dataclass(frozen=True)
class ModulatedWave:
    osc: RestFrameOscillator
    boost: BoostParams

    @property
    def carrier_wavevector(self) -> float:
        return self.boost.gamma * self.osc.k0

    @property
    def carrier_speed(self) -> float:
        return self.boost.beta * self.osc.c

    @property
    def modulation_wavevector(self) -> float:
        return self.boost.gamma * self.boost.beta * self.osc.k0

    @property
    def modulation_speed(self) -> float:
        if self.boost.beta == 0:
            return math.inf
        return self.osc.c / self.boost.beta

    def carrier(self, x, t):
        return np.cos(self.carrier_wavevector * (np.asarray(x) - self.carrier_speed * np.asarray(t)))

    def modulation(self, x, t):
        # written as w0*gamma*(t - beta x/c) so that beta = 0 is regular
        g, b, o = self.boost.gamma, self.boost.beta, self.osc
        return np.sin(o.omega0 * g * (np.asarray(t) - b * np.asarray(x) / o.c))

    def __call__(self, x, t):
        return 2.0 * self.carrier(x, t) * self.modulation(x, t)


@dataclass(frozen=True)
class ExternalPotential:
    """Scalar and vector potentials of an applied field acting on charge ``e``."""

    phi: Callable
    A_vec: Callable = field(default=lambda r: np.zeros(np.shape(r)))
    e: float = 1.0


def _check_beta(boost: BoostParams):
    if not abs(boost.beta) < 1:
        raise ValueError(f"|beta| must be < 1, got {boost.beta!r}")


def boost_standing_wave(osc: RestFrameOscillator, boost: BoostParams) -> ModulatedWave:
    _check_beta(boost)
    return ModulatedWave(osc, boost)


def rest_frame_wave(osc: RestFrameOscillator, x, t):
    return 2.0 * np.cos(osc.k0 * np.asarray(x)) * np.sin(osc.omega0 * np.asarray(t))


def de_broglie_wavevector(osc: RestFrameOscillator, boost: BoostParams) -> float:
    _check_beta(boost)
    return boost.gamma * boost.beta * osc.k0


def energy_momentum(osc: RestFrameOscillator, boost: BoostParams) -> tuple[float, float]:
    _check_beta(boost)
    g = boost.gamma
    return g * osc.m0 * osc.c**2, g * osc.m0 * boost.beta * osc.c


def effective_rest_mass(osc: RestFrameOscillator, pot: ExternalPotential, x) -> float:
    """m0 + e*phi(x)/c^2: the applied potential energy counted as rest energy."""
    return osc.m0 + pot.e * pot.phi(x) / osc.c**2
