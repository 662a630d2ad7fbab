import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eikonal_lab.errors import InvariantViolation
from eikonal_lab.spectrum import (
    BoostParams,
    FieldStats,
    SpectralMode,
    ThermalState,
    background_energy,
    combine_incoherent,
    fluctuation_decomposition,
    planck_energy,
    solve_thermal_ode,
    spectrum_invariance_residual,
    total_fluctuation,
)

pos = st.floats(1e-3, 1e3)


def test_background_energy():
    assert background_energy(SpectralMode(1.0)) == 0.5
    assert background_energy(SpectralMode(2.0)) == 1.0
    assert background_energy(SpectralMode(3.0, hbar=2.0)) == 3.0


def test_mode_and_state_validation():
    with pytest.raises(ValueError):
        SpectralMode(0.0)
    with pytest.raises(ValueError):
        ThermalState(SpectralMode(1.0), -1.0)
    st_ = ThermalState(SpectralMode(2.0, kappa=0.5), 4.0)
    assert st_.mu == -0.5 and st_.x == 1.0
    with pytest.raises(InvariantViolation):
        FieldStats(1.0, -0.1)


def test_combine_incoherent_examples():
    s = combine_incoherent(FieldStats(1, 1), FieldStats(2, 4))
    assert (s.mean, s.variance) == (3, 5)
    s0 = FieldStats(0, 0)
    s1 = FieldStats(2.5, 0.7)
    assert combine_incoherent(s0, s1) == s1
    two = combine_incoherent(FieldStats.chaotic(1), FieldStats.chaotic(1))
    assert (two.mean, two.variance) == (2, 2)
    assert not two.is_chaotic and FieldStats.chaotic(3).is_chaotic
    assert two.mean_square == 6


@given(pos, pos, pos, pos)
def test_combine_incoherent_additive(m1, v1, m2, v2):
    s = combine_incoherent(FieldStats(m1, v1), FieldStats(m2, v2))
    assert s.mean == m1 + m2 and s.variance == v1 + v2
    assert s.mean_square == pytest.approx(s.variance + s.mean**2)


def test_total_fluctuation_examples():
    assert total_fluctuation(1.0, 0.5) == 2.0
    assert total_fluctuation(0.0, 0.7) == 0.0
    assert total_fluctuation(1.0, 0.0) == 1.0
    with pytest.raises(ValueError):
        total_fluctuation(-1.0, 0.0)


def test_decomposition_examples():
    assert fluctuation_decomposition(2.0, 0.0) == (1.0, 0.0)
    E = planck_energy(SpectralMode(1.0), 1.0)
    assert fluctuation_decomposition(E, 0.5)[1] == pytest.approx(math.e - 1, rel=1e-12)
    assert fluctuation_decomposition(1e-12, 0.5)[1] > 1e11
    with pytest.raises(ZeroDivisionError):
        fluctuation_decomposition(0.0, 0.5)


@given(pos, pos)
def test_decomposition_recombines(E_T, E_B):
    w, p = fluctuation_decomposition(E_T, E_B)
    assert (w + p) * E_T**2 == pytest.approx(total_fluctuation(E_T, E_B), rel=4e-16 * 4)


def test_ode_examples():
    mode = SpectralMode(1.0)
    E1, E20, E001 = solve_thermal_ode(mode, [1.0, 1 / 20, 100.0])
    assert E1 == pytest.approx(1 / (math.e - 1), rel=1e-8)
    assert E20 == pytest.approx(math.exp(-20), rel=1e-6)
    assert E001 == pytest.approx(100.0 - 0.5, rel=1e-4)


def test_ode_matches_closed_form_on_scan_with_scales():
    mode = SpectralMode(2.5, hbar=0.4, kappa=3.0)
    xs = np.geomspace(0.1, 20, 50)
    Ts = mode.quantum / (mode.kappa * xs)
    got = solve_thermal_ode(mode, Ts, tol=1e-8)
    want = [planck_energy(mode, T) for T in Ts]
    assert np.max(np.abs(np.array(got) / want - 1)) < 1e-6


def test_ode_preserves_input_order_and_is_monotone():
    mode = SpectralMode(1.0)
    Ts = [3.0, 0.2, 1.0, 0.5]
    E = solve_thermal_ode(mode, Ts)
    order = np.argsort(Ts)
    assert np.all(np.diff(np.array(E)[order]) > 0)
    assert E[0] == pytest.approx(planck_energy(mode, 3.0), rel=1e-7)


def test_ode_rejects_bad_input():
    with pytest.raises(ValueError):
        solve_thermal_ode(SpectralMode(1.0), [1.0, -1.0])
    with pytest.raises(ValueError):
        solve_thermal_ode(SpectralMode(1.0), [1.0], tol=0)
    assert solve_thermal_ode(SpectralMode(1.0), []) == []


def test_invariance_examples():
    assert spectrum_invariance_residual(3, BoostParams(0.5), 1.0) <= 1e-12
    for s in range(5):
        assert spectrum_invariance_residual(s, BoostParams(0.0), 0.3) == 0.0
    assert spectrum_invariance_residual(2, BoostParams(0.5), 1.0) > 0.1
    with pytest.raises(ValueError):
        spectrum_invariance_residual(3, BoostParams(0.5), 1.5)
    with pytest.raises(ValueError):
        BoostParams(1.0)


@given(st.floats(-0.95, 0.95).filter(lambda b: abs(b) > 1e-3), st.floats(-1, 1))
def test_invariance_only_at_cubic(beta, cos):
    boost = BoostParams(beta)
    assert spectrum_invariance_residual(3, boost, cos) <= 1e-12
    D = boost.gamma * (1 - beta * cos)
    # other exponents scale band energy by D**(3-s) exactly
    for s in (0, 1, 2, 4):
        assert spectrum_invariance_residual(s, boost, cos) == pytest.approx(abs(D ** (3 - s) - 1), rel=1e-9, abs=1e-12)
