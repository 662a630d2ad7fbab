import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from eikonal_lab.diffraction import (
    Aperture1D,
    DiffractionPattern,
    GuidanceConfig,
    ImpactHistogram,
    SampledField,
    bin_probabilities,
    boltzmann_density,
    compare_to_schrodinger,
    default_guidance_config,
    diffract,
    dominant_wavevector,
    energy_density_field,
    histogram_peaks,
    local_minima,
    node_spacing,
    propagate_modulation,
    run_walkers,
    schrodinger_screen_intensity,
    simulate_guidance,
    slit_shadow,
)
from eikonal_lab.errors import FittingError
from eikonal_lab.kinematics import RestFrameOscillator, boost_standing_wave
from eikonal_lab.numerics import Grid1D, RngStream
from eikonal_lab.spectrum import BoostParams

LAM = 1.0
K = 2 * math.pi / LAM
TWO_SLIT = Aperture1D.double_slit(20 * LAM, 2 * LAM)
L = 2000 * LAM
DET = Grid1D.from_bounds(-300, 300, 1201)


def test_aperture_validation():
    with pytest.raises(ValueError):
        Aperture1D(((1.0, 0.0),))
    with pytest.raises(ValueError):
        Aperture1D(((0.0, 2.0), (1.0, 3.0)))
    with pytest.raises(ValueError):
        Aperture1D.double_slit(1.0, 2.0)
    assert TWO_SLIT.widest == pytest.approx(2.0) and TWO_SLIT.center == 0.0
    y = np.linspace(-20, 20, 4001)
    assert np.sum(TWO_SLIT.transmission(y, 0.01)) * 0.01 == pytest.approx(4.0, rel=1e-3)


def test_open_line_is_undiffracted():
    p = diffract(K, Aperture1D(((-5000.0, 5000.0),)), L, Grid1D.from_bounds(-300, 300, 601))
    assert np.all(np.abs(p.intensity - 1) < 0.01)


def test_single_slit_first_null():
    a, L1 = 10 * LAM, 20000 * LAM
    det = Grid1D.from_bounds(0, 4000, 8001)
    nulls = local_minima(diffract(K, Aperture1D.single_slit(a), L1, det).intensity, det)
    # sin(theta) = 2 pi / (k a)
    assert nulls[0] / L1 == pytest.approx(2 * math.pi / (K * a), rel=1e-3)


def test_two_slit_fringe_spacing_matches_fraunhofer():
    p = diffract(K, TWO_SLIT, L, DET)
    spacing, resid, nodes = node_spacing(energy_density_field(p).values, DET, np.abs(DET.coords) < 350)
    assert spacing == pytest.approx(2 * math.pi * L / (K * 20 * LAM), rel=1e-3)
    assert resid < 1e-3 and len(nodes) == 6


def test_propagate_modulation_uses_de_broglie_wavevector():
    osc = RestFrameOscillator.from_omega(2 * math.pi / 0.75)  # k0 chosen so gamma*beta*k0 = 2 pi at beta=0.6
    wave = boost_standing_wave(osc, BoostParams(0.6))
    p = propagate_modulation(wave, TWO_SLIT, L, DET)
    assert p.k_mod == pytest.approx(K, rel=1e-14)
    assert np.allclose(p.amplitude, diffract(K, TWO_SLIT, L, DET).amplitude)


def test_diffract_rejects_bad_input():
    with pytest.raises(ValueError):
        diffract(K, TWO_SLIT, -1.0, DET)
    with pytest.raises(ValueError):
        diffract(0.0, TWO_SLIT, L, DET)


def test_paraxial_warning():
    with pytest.warns(RuntimeWarning):
        p = diffract(K, TWO_SLIT, 100.0, Grid1D.from_bounds(-300, 300, 101))
    assert not p.paraxial_ok
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert diffract(K, TWO_SLIT, L, DET).paraxial_ok


def test_two_independent_propagation_routes_agree():
    fres = diffract(K, TWO_SLIT, L, DET).intensity
    fft = schrodinger_screen_intensity(K, TWO_SLIT, L, DET)
    # residual is the cell-averaged slit edges of the grid route
    assert np.max(np.abs(fres - fft)) < 1e-2 * fres.max()


def test_energy_density_examples():
    g = Grid1D.from_bounds(0, 100, 2001)
    k = 0.5
    pat = DiffractionPattern(g, np.cos(k * g.coords).astype(complex), 1.0, k)
    e = energy_density_field(pat)
    assert dominant_wavevector(e.values, g) == pytest.approx(2 * dominant_wavevector(np.cos(k * g.coords), g), rel=0.02)
    assert np.all(energy_density_field(DiffractionPattern(g, np.full(g.n, 0.3 + 0j), 1.0, k)).values == pytest.approx(0.09))


@given(st.floats(0.2, 2.0), st.floats(0, 2 * math.pi))
def test_energy_doubles_single_frequency(k, phase):
    g = Grid1D(4096, 0.0, 0.05)
    m = np.cos(k * g.coords + phase)
    e = energy_density_field(DiffractionPattern(g, m.astype(complex), 1.0, k)).values
    assert np.all(e >= 0)
    assert dominant_wavevector(e, g) == pytest.approx(2 * dominant_wavevector(m, g), abs=2 * 2 * math.pi / (g.n * g.dx))


def test_energy_nodes_are_half_period_of_signed_amplitude():
    # narrow-slit far-field amplitude is the real profile cos(k d y / 2L), which changes sign at each node
    p = diffract(K, TWO_SLIT, L, DET)
    signed = np.cos(K * 20 * LAM * DET.coords / (2 * L))
    amp_period = 2 * math.pi / dominant_wavevector(signed, DET)
    spacing, _, _ = node_spacing(energy_density_field(p).values, DET, np.abs(DET.coords) < 350)
    assert spacing == pytest.approx(amp_period / 2, rel=0.02)


def test_compare_to_schrodinger_claim_and_scaling():
    r = compare_to_schrodinger(TWO_SLIT, K, L, DET)
    assert r.k_mod == r.k_dB == K
    assert r.rel_diff <= 0.02
    half = compare_to_schrodinger(Aperture1D.double_slit(10 * LAM, 2 * LAM), K, L, Grid1D.from_bounds(-450, 450, 1801))
    assert half.energy_node_spacing == pytest.approx(2 * r.energy_node_spacing, rel=1e-3)
    assert half.schrodinger_fringe_spacing == pytest.approx(2 * r.schrodinger_fringe_spacing, rel=1e-3)
    with pytest.raises(ValueError):
        compare_to_schrodinger(Aperture1D.single_slit(2.0), K, L, DET)


def test_fitting_error_on_too_few_nodes():
    g = Grid1D.from_bounds(0, 10, 101)
    with pytest.raises(FittingError):
        node_spacing(g.coords**2 + 1, g)


def _flat(n=801, half=400.0):
    g = Grid1D.from_bounds(-half, half, n)
    return SampledField(g, np.zeros(n))


def test_zero_drift_is_pure_diffusion():
    energy = _flat()
    cfg = GuidanceConfig(1.0, 0.5, 0.5, 400, RngStream(5), launch=((-10.0, 10.0),))
    x = run_walkers(energy, 20000, cfg)
    s, a = cfg.noise * math.sqrt(cfg.dt * cfg.steps), 10.0

    def G(u):
        return u * stats.norm.cdf(u) + stats.norm.pdf(u)

    def cdf(y):
        return s / (2 * a) * (G((y + a) / s) - G((y - a) / s))

    assert stats.kstest(x, cdf).pvalue > 0.01


def _well():
    g = Grid1D.from_bounds(-100, 100, 801)
    return SampledField(g, (g.coords / 100) ** 2)


def test_single_well_relaxes_to_boltzmann():
    energy = _well()
    cfg = default_guidance_config(energy, RngStream(11))
    hist = simulate_guidance(energy, 20000, cfg, bins=25)
    prob = bin_probabilities(boltzmann_density(energy, cfg), energy.grid, hist.bin_edges)
    # walkers that diffuse out are absorbed into the two end bins
    inner, p_in = hist.counts[1:-1], prob[1:-1]
    assert np.corrcoef(inner, p_in)[0, 1] > 0.98
    peaks = histogram_peaks(hist)
    assert len(peaks) == 1 and abs(peaks[0]) <= hist.width
    expected = p_in / p_in.sum() * inner.sum()
    chi2 = np.sum((inner - expected) ** 2 / np.maximum(expected, 1))
    assert chi2 / len(expected) < 2.0


def test_stationarity_improves_with_run_length():
    energy = _well()
    base = default_guidance_config(energy, RngStream(2), launch=((60.0, 80.0),))
    dens = boltzmann_density(energy, base)
    fine = energy.grid.coords
    cdf_tab = np.concatenate([[0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * energy.grid.dx)])

    def ks(steps):
        cfg = GuidanceConfig(base.mobility, base.noise, base.dt, steps, base.rng, base.launch)
        return stats.kstest(run_walkers(energy, 5000, cfg), lambda y: np.interp(y, fine, cdf_tab)).statistic

    d = [ks(n) for n in (base.steps // 50, base.steps // 5, base.steps)]
    assert d[0] > d[1] > d[2]


def test_guidance_is_reproducible_and_worker_independent():
    energy = energy_density_field(diffract(K, TWO_SLIT, L, DET))
    cfg = default_guidance_config(energy, RngStream(3), n_relax=2)
    a = simulate_guidance(energy, 20000, cfg)
    b = simulate_guidance(energy, 20000, cfg, workers=3)
    assert a.counts.tobytes() == b.counts.tobytes()
    other = GuidanceConfig(cfg.mobility, cfg.noise, cfg.dt, cfg.steps, RngStream(4))
    assert simulate_guidance(energy, 20000, other).counts.tobytes() != a.counts.tobytes()


def test_guidance_config_validation_and_launch():
    with pytest.raises(ValueError):
        GuidanceConfig(1.0, 0.0, 0.1, 10, RngStream(0))
    with pytest.raises(ValueError):
        GuidanceConfig(1.0, 1.0, 0.1, -1, RngStream(0))
    energy = _flat()
    cfg = GuidanceConfig(1.0, 0.1, 0.1, 0, RngStream(0), launch=slit_shadow(TWO_SLIT))
    x = run_walkers(energy, 5000, cfg)
    assert np.all(np.abs(np.abs(x) - 10) <= 1.0)
    with pytest.raises(ValueError):
        run_walkers(energy, 0, cfg)


def test_histogram_validation_and_edge_bins():
    with pytest.raises(ValueError):
        ImpactHistogram(np.array([0.0, 1.0]), np.array([1, 2]))
    edges = np.linspace(0, 10, 11)
    counts = np.array([90, 1, 2, 10, 2, 1, 1, 1, 1, 95])
    assert list(histogram_peaks(ImpactHistogram(edges, counts), smooth=1)) == [3.5]
