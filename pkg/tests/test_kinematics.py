import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eikonal_lab.errors import InvariantViolation
from eikonal_lab.kinematics import (
    ExternalPotential,
    RestFrameOscillator,
    boost_standing_wave,
    de_broglie_wavevector,
    effective_rest_mass,
    energy_momentum,
    rest_frame_wave,
)
from eikonal_lab.spectrum import BoostParams

betas = st.floats(-0.99, 0.99, allow_subnormal=False)
scales = st.floats(0.1, 10.0)


def test_oscillator_requires_equilibrium():
    with pytest.raises(InvariantViolation):
        RestFrameOscillator(1.0, 2.0)
    osc = RestFrameOscillator.from_mass(2.0, c=3.0, hbar=0.5)
    assert osc.omega0 == pytest.approx(36.0) and osc.k0 == pytest.approx(12.0)
    with pytest.raises(ValueError):
        RestFrameOscillator.from_omega(-1.0)


def test_rest_limit():
    osc = RestFrameOscillator.from_omega(1.3)
    w = boost_standing_wave(osc, BoostParams(0.0))
    x, t = np.meshgrid(np.linspace(-5, 5, 21), np.linspace(0, 3, 7))
    assert np.allclose(w(x, t), 2 * np.cos(1.3 * x) * np.sin(1.3 * t), atol=1e-15)
    assert w.modulation_speed == math.inf and w.modulation_wavevector == 0.0


def test_beta_06_numbers():
    osc = RestFrameOscillator.from_omega(1.0)
    w = boost_standing_wave(osc, BoostParams(0.6))
    assert w.boost.gamma == pytest.approx(1.25, rel=1e-15)
    assert w.modulation_wavevector == pytest.approx(0.75, rel=1e-15)
    assert w.modulation_speed == pytest.approx(5 / 3, rel=1e-15)
    assert energy_momentum(osc, BoostParams(0.6)) == pytest.approx((1.25, 0.75), rel=1e-15)
    assert de_broglie_wavevector(osc, BoostParams(0.8)) == pytest.approx(4 / 3, rel=1e-15)
    assert de_broglie_wavevector(osc, BoostParams(0.0)) == 0.0
    assert energy_momentum(osc, BoostParams(0.0)) == (1.0, 0.0)


@given(betas)
def test_wave_vanishes_at_origin(beta):
    w = boost_standing_wave(RestFrameOscillator.from_omega(2.0), BoostParams(beta))
    assert w(0.0, 0.0) == 0.0


@given(betas, scales, scales, scales)
def test_de_broglie_identity_and_mass_shell(beta, omega, c, hbar):
    osc = RestFrameOscillator.from_omega(omega, c, hbar)
    boost = BoostParams(beta)
    k = de_broglie_wavevector(osc, boost)
    E, p = energy_momentum(osc, boost)
    v = beta * c
    assert hbar * k == pytest.approx(boost.gamma * osc.m0 * v, rel=1e-12, abs=1e-300)
    rest = (osc.m0 * c**2) ** 2
    assert abs(E * E - (p * c) ** 2 - rest) <= 1e-10 * rest
    w = boost_standing_wave(osc, boost)
    assert w.modulation_wavevector == pytest.approx(k, rel=1e-15, abs=0)
    if beta != 0:
        assert w.carrier_speed * w.modulation_speed == pytest.approx(c * c, rel=1e-14)


@given(betas, scales, st.floats(-20, 20), st.floats(-20, 20))
def test_boosted_wave_is_lorentz_transformed_rest_wave(beta, omega, x, t):
    c = 1.0
    osc = RestFrameOscillator.from_omega(omega, c)
    boost = BoostParams(beta)
    g, v = boost.gamma, beta * c
    # rest frame moves with +v: x' = g (x - v t), t' = g (t - v x / c^2)
    xr, tr = g * (x - v * t), g * (t - v * x / c**2)
    want = rest_frame_wave(osc, xr, tr)
    got = boost_standing_wave(osc, boost)(x, t)
    assert got == pytest.approx(float(want), abs=1e-10 * max(1.0, omega * g * (abs(x) + abs(t))))


def test_boost_rejects_superluminal():
    with pytest.raises(ValueError):
        BoostParams(-1.0)


def test_effective_rest_mass():
    osc = RestFrameOscillator.from_mass(2.0, c=1.5)
    rest = osc.m0 * osc.c**2
    assert effective_rest_mass(osc, ExternalPotential(lambda x: 0.0 * x), 1.0) == 2.0
    assert effective_rest_mass(osc, ExternalPotential(lambda x: rest), 0.0) == pytest.approx(4.0)
    assert effective_rest_mass(osc, ExternalPotential(lambda x: -0.1 * rest), 0.0) == pytest.approx(1.8)
    assert effective_rest_mass(osc, ExternalPotential(lambda x: rest / 2, e=2.0), 0.0) == pytest.approx(4.0)
