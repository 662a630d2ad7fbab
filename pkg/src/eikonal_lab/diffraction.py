"""Diffraction of the modulation wave and stochastic guidance of particles into its energy nodes.

Geometry is one transverse coordinate ``y`` on a screen at distance ``L``
behind an aperture line. Two independent propagation routes are provided:

* ``fresnel_amplitude`` integrates the paraxial Huygens kernel over each open
  interval in closed form (Fresnel integrals);
* ``angular_spectrum_propagate`` evolves the transverse free Schrodinger
  equation with an exact FFT propagator (the paraxial wave equation in
  ``z`` is the same PDE with ``t = m L / (hbar k)``).
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special

from .errors import FittingError
from .kinematics import ModulatedWave
from .numerics import Grid1D, RngStream, derivative

WALKER_CHUNK = 8192


@dataclass(frozen=True)
class Aperture1D:
    open_intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        ivs = tuple((float(lo), float(hi)) for lo, hi in self.open_intervals)
        object.__setattr__(self, "open_intervals", ivs)
        for lo, hi in ivs:
            if not lo < hi:
                raise ValueError(f"interval ({lo}, {hi}) must have lo < hi")
        for (_, hi), (lo, _) in zip(ivs, ivs[1:]):
            if not hi <= lo:
                raise ValueError("intervals must be sorted and disjoint")

    @classmethod
    def single_slit(cls, width: float, center: float = 0.0) -> "Aperture1D":
        return cls(((center - width / 2, center + width / 2),))

    @classmethod
    def double_slit(cls, separation: float, width: float, center: float = 0.0) -> "Aperture1D":
        if width >= separation:
            raise ValueError("slit width must be smaller than the separation")
        h = separation / 2
        return cls(((center - h - width / 2, center - h + width / 2), (center + h - width / 2, center + h + width / 2)))

    @property
    def center(self) -> float:
        return 0.5 * (self.open_intervals[0][0] + self.open_intervals[-1][1])

    @property
    def widest(self) -> float:
        return max(hi - lo for lo, hi in self.open_intervals)

    def transmission(self, y: np.ndarray, dy: float) -> np.ndarray:
        """Fraction of each cell ``[y - dy/2, y + dy/2]`` that is open."""
        lo_c, hi_c = y - dy / 2, y + dy / 2
        frac = np.zeros_like(y, dtype=float)
        for lo, hi in self.open_intervals:
            frac += np.clip(np.minimum(hi_c, hi) - np.maximum(lo_c, lo), 0.0, None)
        return frac / dy


@dataclass(frozen=True)
class DiffractionPattern:
    detector: Grid1D
    amplitude: np.ndarray
    L: float
    k_mod: float
    paraxial_ok: bool = True

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.amplitude) ** 2


@dataclass(frozen=True)
class SampledField:
    grid: Grid1D
    values: np.ndarray


def _paraxial_check(k: float, aperture: Aperture1D, L: float, detector: Grid1D) -> bool:
    reach = max(abs(detector.x0 - aperture.center), abs(detector.x_max - aperture.center))
    ok = k * L >= 100.0 and reach / L <= 0.3
    if not ok:
        warnings.warn(
            f"geometry outside the paraxial regime (k*L = {k * L:.3g}, max angle ~ {reach / L:.3g} rad)",
            RuntimeWarning,
            stacklevel=3,
        )
    return ok


def fresnel_amplitude(k: float, aperture: Aperture1D, L: float, y: np.ndarray) -> np.ndarray:
    """Paraxial Huygens sum ``sqrt(k/(2 pi i L)) * int exp(i k (y-s)^2 / 2L) ds`` over the open intervals.

    A fully open line gives amplitude 1 (an undiffracted unit plane wave).
    """
    y = np.asarray(y, dtype=float)
    scale = math.sqrt(k / (math.pi * L))
    total = np.zeros(y.shape, dtype=complex)
    for lo, hi in aperture.open_intervals:
        s1, c1 = special.fresnel((lo - y) * scale)
        s2, c2 = special.fresnel((hi - y) * scale)
        total += (c2 - c1) + 1j * (s2 - s1)
    return total / (1.0 + 1.0j)


def propagate_modulation(wave: ModulatedWave, aperture: Aperture1D, L: float, detector: Grid1D) -> DiffractionPattern:
    """Diffract the modulation component (wavevector gamma*beta*k0) through ``aperture``.

    The carrier only multiplies the result by a uniform factor and is not propagated.
    """
    k = abs(wave.modulation_wavevector)
    return diffract(k, aperture, L, detector)


def diffract(k: float, aperture: Aperture1D, L: float, detector: Grid1D) -> DiffractionPattern:
    if not aperture.open_intervals:
        raise ValueError("aperture has no open intervals")
    if not L > 0:
        raise ValueError("propagation distance must be positive")
    if not k > 0:
        raise ValueError("wavevector must be positive (a particle at rest has no modulation)")
    ok = _paraxial_check(k, aperture, L, detector)
    amp = fresnel_amplitude(k, aperture, L, detector.coords)
    return DiffractionPattern(detector, amp, float(L), float(k), ok)


def angular_spectrum_propagate(psi0: np.ndarray, grid: Grid1D, k: float, L: float) -> np.ndarray:
    """Exact free propagation of a transverse field by ``L`` in the paraxial approximation."""
    q = 2 * np.pi * np.fft.fftfreq(grid.n, d=grid.dx)
    return np.fft.ifft(np.fft.fft(psi0) * np.exp(-0.5j * q * q * L / k))


def schrodinger_screen_intensity(k: float, aperture: Aperture1D, L: float, detector: Grid1D) -> np.ndarray:
    """|psi|^2 on the detector for a unit plane wave at wavevector ``k`` passing ``aperture``."""
    lam = 2 * np.pi / k
    dx = lam / 4
    lo = min(detector.x0, aperture.open_intervals[0][0])
    hi = max(detector.x_max, aperture.open_intervals[-1][1])
    # N dx^2 >= lambda L keeps the chirped propagator alias free; 4x margin
    need = max(4 * lam * L / dx**2, 4 * (hi - lo) / dx)
    n = 1 << int(math.ceil(math.log2(need)))
    g = Grid1D(n, 0.5 * (lo + hi) - (n // 2) * dx, dx)
    psi0 = aperture.transmission(g.coords, dx).astype(complex)
    psi = angular_spectrum_propagate(psi0, g, k, L)
    return np.interp(detector.coords, g.coords, np.abs(psi) ** 2)


def energy_density_field(pattern: DiffractionPattern) -> SampledField:
    """Cycle-averaged square of the modulation field on the detector.

    For a real modulation profile ``m(y)`` this is ``m**2`` and so oscillates
    at twice the spatial frequency of ``m``; for a complex diffraction
    amplitude it is ``|amplitude|**2``.
    """
    return SampledField(pattern.detector, np.abs(pattern.amplitude) ** 2)


def dominant_wavevector(values: np.ndarray, grid: Grid1D) -> float:
    """Angular wavevector of the largest non-DC component of a sampled real field."""
    v = np.asarray(values, dtype=float)
    power = np.abs(np.fft.rfft(v - v.mean()))
    power[0] = 0.0
    freqs = 2 * np.pi * np.fft.rfftfreq(len(v), d=grid.dx)
    return float(freqs[int(np.argmax(power))])


def local_minima(values: np.ndarray, grid: Grid1D, depth: float = 0.5) -> np.ndarray:
    """Sub-grid positions of interior minima lying below ``depth`` times the field maximum."""
    v = np.asarray(values, dtype=float)
    i = np.nonzero((v[1:-1] < v[:-2]) & (v[1:-1] <= v[2:]))[0] + 1
    i = i[v[i] < depth * v.max()]
    a, b, c = v[i - 1], v[i], v[i + 1]
    denom = a - 2 * b + c
    with np.errstate(divide="ignore", invalid="ignore"):
        shift = np.where(denom > 0, 0.5 * (a - c) / denom, 0.0)
    return grid.x0 + (i + shift) * grid.dx


def fit_spacing(positions: np.ndarray, max_residual: float = 0.1) -> tuple[float, float]:
    """Least-squares spacing of an evenly spaced point train; returns (spacing, relative rms residual)."""
    pos = np.sort(np.asarray(positions, dtype=float))
    if len(pos) < 3:
        raise FittingError(f"need at least 3 nodes, found {len(pos)}", math.inf)
    idx = np.arange(len(pos))
    slope, icpt = np.polyfit(idx, pos, 1)
    resid = float(np.sqrt(np.mean((pos - (slope * idx + icpt)) ** 2)) / slope)
    if resid > max_residual:
        raise FittingError("node positions are not evenly spaced", resid)
    return float(slope), resid


def central_window(aperture: Aperture1D, k: float, L: float, detector: Grid1D, frac: float = 0.8) -> np.ndarray:
    """Detector mask for the central lobe of the single-slit envelope."""
    half = frac * 2 * np.pi * L / (k * aperture.widest)
    return np.abs(detector.coords - aperture.center) < half


def node_spacing(values: np.ndarray, grid: Grid1D, mask: np.ndarray | None = None) -> tuple[float, float, np.ndarray]:
    nodes = local_minima(values, grid)
    if mask is not None:
        keep = np.interp(nodes, grid.coords, mask.astype(float)) > 0.5
        nodes = nodes[keep]
    spacing, resid = fit_spacing(nodes)
    return spacing, resid, nodes


@dataclass(frozen=True)
class ComparisonReport:
    k_mod: float
    k_dB: float
    energy_node_spacing: float
    schrodinger_fringe_spacing: float
    fraunhofer_spacing: float
    rel_diff: float
    energy_fit_residual: float
    schrodinger_fit_residual: float
    n_nodes: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def compare_to_schrodinger(aperture: Aperture1D, k_dB: float, L: float, detector: Grid1D) -> ComparisonReport:
    """Energy-node spacing of the modulation pattern vs fringe spacing of free |psi|^2.

    Both use wavevector ``k_dB``; the two fields are produced by independent
    propagation routes and fitted independently.
    """
    if len(aperture.open_intervals) != 2:
        raise ValueError("comparison expects a two-slit aperture")
    (a0, a1), (b0, b1) = aperture.open_intervals
    d = 0.5 * (b0 + b1) - 0.5 * (a0 + a1)
    pattern = diffract(k_dB, aperture, L, detector)
    energy = energy_density_field(pattern)
    mask = central_window(aperture, k_dB, L, detector)
    s_energy, r_energy, nodes = node_spacing(energy.values, detector, mask)
    qm = schrodinger_screen_intensity(k_dB, aperture, L, detector)
    s_qm, r_qm, _ = node_spacing(qm, detector, mask)
    return ComparisonReport(
        k_mod=pattern.k_mod,
        k_dB=float(k_dB),
        energy_node_spacing=s_energy,
        schrodinger_fringe_spacing=s_qm,
        fraunhofer_spacing=2 * np.pi * L / (k_dB * d),
        rel_diff=abs(s_energy - s_qm) / s_qm,
        energy_fit_residual=r_energy,
        schrodinger_fit_residual=r_qm,
        n_nodes=len(nodes),
    )


@dataclass(frozen=True)
class GuidanceConfig:
    """Overdamped Langevin walkers ``dx = -mobility U'(x) dt + noise sqrt(dt) N(0,1)``.

    ``launch`` is a list of (lo, hi) intervals for the uniform launch
    distribution; ``None`` launches across the whole energy grid.
    """

    mobility: float
    noise: float
    dt: float
    steps: int
    rng: RngStream
    launch: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if not (self.mobility > 0 and self.noise > 0 and self.dt > 0):
            raise ValueError("mobility, noise and dt must be positive")
        if int(self.steps) != self.steps or self.steps < 0:
            raise ValueError("steps must be a non-negative integer")
        if self.launch is not None:
            object.__setattr__(self, "launch", tuple((float(a), float(b)) for a, b in self.launch))


@dataclass(frozen=True)
class ImpactHistogram:
    bin_edges: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        if len(self.counts) != len(self.bin_edges) - 1:
            raise ValueError("need len(counts) == len(bin_edges) - 1")
        if np.any(np.diff(self.bin_edges) <= 0):
            raise ValueError("bin edges must increase")

    @property
    def total(self) -> int:
        return int(np.sum(self.counts))

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    @property
    def width(self) -> float:
        return float(np.max(np.diff(self.bin_edges)))


def normalized_potential(energy: SampledField) -> np.ndarray:
    v = np.asarray(energy.values, dtype=float)
    top = v.max()
    return v / top if top > 0 else np.zeros_like(v)


def slit_shadow(aperture: Aperture1D) -> tuple[tuple[float, float], ...]:
    return aperture.open_intervals


def default_guidance_config(
    energy: SampledField,
    rng: RngStream,
    mobility: float = 1.0,
    concentration: float = 8.0,
    dt_frac: float = 0.02,
    n_relax: float = 20.0,
    launch=None,
) -> GuidanceConfig:
    """Noise such that ``2 mobility U_max / noise^2 = concentration`` (U_max = 1);
    dt resolves the stiffest curvature and the run spans ``n_relax`` slowest well relaxations."""
    U = normalized_potential(energy)
    noise = math.sqrt(2 * mobility / concentration)
    curv = np.abs(derivative(U, energy.grid, 2))
    kmax = float(curv.max()) if curv.max() > 0 else 1.0
    dt = dt_frac / (mobility * kmax)
    # slowest relaxation: curvature at the deepest minima
    mins = np.nonzero((U[1:-1] <= U[:-2]) & (U[1:-1] <= U[2:]))[0] + 1
    kmin = float(np.min(curv[mins])) if len(mins) else kmax
    kmin = max(kmin, 1e-3 * kmax)
    steps = int(math.ceil(n_relax / (mobility * kmin * dt)))
    return GuidanceConfig(mobility, noise, dt, steps, rng, launch)


def _launch(gen: np.random.Generator, n: int, intervals) -> np.ndarray:
    lengths = np.array([hi - lo for lo, hi in intervals])
    u = gen.random(n) * lengths.sum()
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    j = np.clip(np.searchsorted(cum, u, side="right") - 1, 0, len(intervals) - 1)
    los = np.array([lo for lo, _ in intervals])
    return los[j] + (u - cum[j])


def _walk_chunk(chunk: int, n: int, grid_x: np.ndarray, force: np.ndarray, cfg: GuidanceConfig, launch) -> np.ndarray:
    gen = cfg.rng.spawn(chunk).generator()
    x = _launch(gen, n, launch)
    lo, hi = grid_x[0], grid_x[-1]
    alive = np.ones(n, dtype=bool)
    kick = cfg.noise * math.sqrt(cfg.dt)
    for _ in range(cfg.steps):
        xi = gen.standard_normal(n)
        step = cfg.mobility * np.interp(x, grid_x, force) * cfg.dt + kick * xi
        x = np.where(alive, x + step, x)
        out_lo, out_hi = x <= lo, x >= hi
        x = np.where(out_lo, lo, np.where(out_hi, hi, x))
        alive &= ~(out_lo | out_hi)
    return x


def run_walkers(energy: SampledField, n_particles: int, cfg: GuidanceConfig, workers: int = 1) -> np.ndarray:
    """Final walker positions. Chunk ``i`` of ``WALKER_CHUNK`` walkers draws from ``cfg.rng.spawn(i)``,
    so the result does not depend on ``workers``. Walkers reaching the grid ends are absorbed there."""
    if n_particles < 1:
        raise ValueError("need at least one particle")
    grid = energy.grid
    force = -derivative(normalized_potential(energy), grid, 1)
    launch = cfg.launch if cfg.launch is not None else ((grid.x0, grid.x_max),)
    sizes = [min(WALKER_CHUNK, n_particles - s) for s in range(0, n_particles, WALKER_CHUNK)]
    xs = grid.coords

    def job(i):
        return _walk_chunk(i, sizes[i], xs, force, cfg, launch)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(i) for i in range(len(sizes))]
    return np.concatenate(parts)


def simulate_guidance(
    energy: SampledField,
    n_particles: int,
    cfg: GuidanceConfig,
    bins: int | Sequence[float] = 200,
    workers: int = 1,
) -> ImpactHistogram:
    x = run_walkers(energy, n_particles, cfg, workers)
    if np.isscalar(bins):
        edges = np.linspace(energy.grid.x0, energy.grid.x_max, int(bins) + 1)
    else:
        edges = np.asarray(bins, dtype=float)
    # absorbed walkers sit exactly on the grid ends and land in the edge bins
    counts, _ = np.histogram(np.clip(x, edges[0], edges[-1]), bins=edges)
    return ImpactHistogram(edges, counts.astype(np.int64))


def boltzmann_density(energy: SampledField, cfg: GuidanceConfig) -> np.ndarray:
    """Stationary density ``exp(-2 mobility U / noise^2) / Z`` on the energy grid."""
    U = normalized_potential(energy)
    w = np.exp(-2 * cfg.mobility * U / cfg.noise**2)
    g = energy.grid
    return w / (g.dx * (w.sum() - 0.5 * (w[0] + w[-1])))


def bin_probabilities(density: np.ndarray, grid: Grid1D, edges: np.ndarray, refine: int = 8) -> np.ndarray:
    fine = np.linspace(grid.x0, grid.x_max, (grid.n - 1) * refine + 1)
    dens = np.interp(fine, grid.coords, density)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(fine))])
    return np.diff(np.interp(edges, fine, cdf))


def histogram_peaks(hist: ImpactHistogram, smooth: int = 3, rel_height: float = 0.2) -> np.ndarray:
    """Centers of local maxima of the box-smoothed histogram above ``rel_height`` of its maximum.

    The two outermost bins collect absorbed walkers and are never reported as peaks.
    """
    counts = hist.counts.astype(float)
    counts[0] = counts[-1] = 0.0
    c = np.convolve(counts, np.ones(smooth) / smooth, mode="same")
    i = np.nonzero((c[1:-1] > c[:-2]) & (c[1:-1] >= c[2:]))[0] + 1
    i = i[(i > 1) & (i < len(c) - 2)]
    i = i[c[i] > rel_height * c.max()]
    return hist.centers[i]
