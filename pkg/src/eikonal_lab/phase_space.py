"""Liouville and Schrodinger dynamics for quadratic potentials and the transform linking them.

Conventions (natural units by default):

* kernel transform  ``rho_hat(x, x') = int exp(2i p x'/hbar) rho(x, p) dp``;
* its pure-state form ``rho_hat(x, x') = conj(psi(x - x')) psi(x + x')``, so the
  inverse carries ``1/(pi hbar)`` and ``int rho dp = |psi(x)|^2``;
* Schrodinger equation ``i hbar psi_t = -(hbar^2/2m) psi_xx + V psi``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg, ndimage

from .errors import InputShapeError, InvariantViolation, StabilityError, UnsupportedPotential
from .numerics import Grid1D, Grid2D

ADMISSIBLE_TOL = 1e-9
OBSERVABLES = ("x", "p", "kinetic", "potential")


@dataclass(frozen=True)
class SystemParams:
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.mass > 0 and self.hbar > 0):
            raise ValueError("mass and hbar must be positive")


@dataclass(frozen=True)
class QuadraticPotential:
    """V(x) = a2 x^2 + a1 x + a0."""

    a2: float = 0.0
    a1: float = 0.0
    a0: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.a2, self.a1, self.a0)):
            raise ValueError("coefficients must be finite")

    @classmethod
    def harmonic(cls, sys: SystemParams, omega: float, center: float = 0.0) -> "QuadraticPotential":
        k = 0.5 * sys.mass * omega**2
        return cls(k, -2 * k * center + 0.0, k * center**2)

    @classmethod
    def linear(cls, force: float) -> "QuadraticPotential":
        """Uniform force ``force`` (V = -force * x)."""
        return cls(0.0, -force, 0.0)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return (self.a2 * x + self.a1) * x + self.a0

    def force(self, x):
        return -(2 * self.a2 * np.asarray(x, dtype=float) + self.a1)

    def to_dict(self) -> dict:
        return {"a2": self.a2, "a1": self.a1, "a0": self.a0}


@dataclass(frozen=True)
class SeparationFunction:
    """r F(r) + V(r); for quadratic V this is -a2 r^2 + a0."""

    V: QuadraticPotential

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return r * self.V.force(r) + self.V(r)


def separation_function(V: QuadraticPotential) -> SeparationFunction:
    _require_quadratic(V)
    return SeparationFunction(V)


def _require_quadratic(V):
    if not isinstance(V, QuadraticPotential):
        raise UnsupportedPotential(f"only quadratic potentials are supported, got {type(V).__name__}")


def _trapz_weights(n: int) -> np.ndarray:
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    return w


def integrate2d(values: np.ndarray, grid: Grid2D) -> float:
    wx, wp = _trapz_weights(grid.gx.n), _trapz_weights(grid.gp.n)
    return float(wx @ values @ wp * grid.cell)


@dataclass(frozen=True)
class PhaseSpaceDensity:
    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "values", v)
        if abs(self.norm - 1.0) > 1e-6:
            raise InvariantViolation(f"phase-space density integrates to {self.norm!r}, expected 1")

    @property
    def norm(self) -> float:
        return integrate2d(self.values, self.grid)

    @property
    def minimum(self) -> float:
        return float(self.values.min())

    @property
    def admissible(self) -> bool:
        return self.minimum >= -ADMISSIBLE_TOL

    def position_marginal(self) -> np.ndarray:
        return self.values @ _trapz_weights(self.grid.gp.n) * self.grid.gp.dx

    def momentum_marginal(self) -> np.ndarray:
        return _trapz_weights(self.grid.gx.n) @ self.values * self.grid.gx.dx


@dataclass(frozen=True)
class WaveFunction:
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples, got shape {v.shape}")
        object.__setattr__(self, "values", v)
        if abs(self.norm - 1.0) > 1e-8:
            raise InvariantViolation(f"wavefunction norm is {self.norm!r}, expected 1")

    @property
    def norm(self) -> float:
        return _norm(self.values, self.grid)

    @classmethod
    def normalized(cls, grid: Grid1D, values) -> "WaveFunction":
        v = np.asarray(values, dtype=complex)
        return cls(grid, v / math.sqrt(_norm(v, grid)))

    @classmethod
    def gaussian(cls, grid: Grid1D, x0: float, p0: float, sigma: float, sys: SystemParams = SystemParams()):
        """Minimum-uncertainty packet with position spread ``sigma``."""
        x = grid.coords
        v = np.exp(-((x - x0) ** 2) / (4 * sigma**2) + 1j * p0 * (x - x0) / sys.hbar)
        return cls.normalized(grid, v)

    @classmethod
    def coherent(cls, grid: Grid1D, x0: float, p0: float, sys: SystemParams, omega: float):
        return cls.gaussian(grid, x0, p0, math.sqrt(sys.hbar / (2 * sys.mass * omega)), sys)

    @classmethod
    def harmonic_eigenstate(cls, grid: Grid1D, n: int, sys: SystemParams, omega: float, center: float = 0.0):
        return cls.normalized(grid, hermite_functions(grid, n, sys, omega, center)[n])

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2


def _norm(v: np.ndarray, grid: Grid1D) -> float:
    d = np.abs(v) ** 2
    return float(grid.dx * (d.sum() - 0.5 * (d[0] + d[-1])))


def hermite_functions(grid: Grid1D, n_max: int, sys: SystemParams, omega: float, center: float = 0.0) -> np.ndarray:
    """Harmonic-oscillator eigenfunctions 0..n_max on the grid via the stable three-term recursion."""
    s = math.sqrt(sys.mass * omega / sys.hbar)
    xi = s * (grid.coords - center)
    out = np.empty((n_max + 1, grid.n))
    out[0] = (s**2 / math.pi) ** 0.25 * np.exp(-0.5 * xi * xi)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * xi * out[0]
    for n in range(1, n_max):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * xi * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def grid_for_state(lo: float, hi: float, sigma: float, n: int = 256, width: float = 10.0) -> Grid1D:
    """Grid spanning ``[lo - width*sigma, hi + width*sigma]``.

    Cutting a Gaussian at 8 sigma already leaves ~1e-9 negative ripples in its
    phase-space density; 10 sigma pushes them below 1e-12.
    """
    return Grid1D.from_bounds(lo - width * sigma, hi + width * sigma, n)


# ---------------------------------------------------------------- moments


def _spectral_derivative(psi: np.ndarray, grid: Grid1D) -> np.ndarray:
    k = 2 * np.pi * np.fft.fftfreq(grid.n, d=grid.dx)
    return np.fft.ifft(1j * k * np.fft.fft(psi))


def expectation(state, observable: str, V: QuadraticPotential | None = None, sys: SystemParams = SystemParams()) -> float:
    """<x>, <p>, <p^2/2m> or <V>.

    A density is integrated directly over phase space; a wavefunction uses the
    diagonal x = x' of its kernel (``-i hbar d/dx`` acting before the diagonal
    is taken for momentum terms).
    """
    if observable not in OBSERVABLES:
        raise ValueError(f"unknown observable {observable!r}; expected one of {OBSERVABLES}")
    if observable == "potential" and V is None:
        raise ValueError("potential expectation needs V")
    if isinstance(state, PhaseSpaceDensity):
        X, P = state.grid.mesh()
        f = {
            "x": lambda: X,
            "p": lambda: P,
            "kinetic": lambda: P * P / (2 * sys.mass),
            "potential": lambda: V(X),
        }[observable]()
        return integrate2d(f * state.values, state.grid)
    if isinstance(state, WaveFunction):
        psi, g = state.values, state.grid
        x = g.coords
        if observable == "x":
            val = np.sum(x * np.abs(psi) ** 2)
        elif observable == "potential":
            val = np.sum(V(x) * np.abs(psi) ** 2)
        else:
            dpsi = _spectral_derivative(psi, g)
            if observable == "p":
                val = np.real(np.sum(np.conj(psi) * (-1j * sys.hbar) * dpsi))
            else:
                val = sys.hbar**2 / (2 * sys.mass) * np.sum(np.abs(dpsi) ** 2)
        return float(val * g.dx)
    raise TypeError(f"unsupported state type {type(state).__name__}")


def spread(state, observable: str, sys: SystemParams = SystemParams()) -> float:
    """Standard deviation of x or p."""
    if observable == "x":
        if isinstance(state, WaveFunction):
            x = state.grid.coords
            m2 = float(np.sum(x * x * state.density) * state.grid.dx)
        else:
            X, _ = state.grid.mesh()
            m2 = integrate2d(X * X * state.values, state.grid)
        m1 = expectation(state, "x", sys=sys)
    elif observable == "p":
        m2 = 2 * sys.mass * expectation(state, "kinetic", sys=sys)
        m1 = expectation(state, "p", sys=sys)
    else:
        raise ValueError("spread is defined for 'x' and 'p'")
    return math.sqrt(max(m2 - m1 * m1, 0.0))


def momentum_distribution(psi: WaveFunction, p: np.ndarray, sys: SystemParams = SystemParams()) -> np.ndarray:
    """|phi(p)|^2 with phi(p) = (2 pi hbar)^(-1/2) int psi(x) exp(-i p x/hbar) dx, by direct quadrature."""
    x = psi.grid.coords
    phase = np.exp(-1j * np.outer(p, x) / sys.hbar)
    phi = phase @ psi.values * psi.grid.dx / math.sqrt(2 * math.pi * sys.hbar)
    return np.abs(phi) ** 2


# ---------------------------------------------------------------- transforms


@dataclass(frozen=True)
class KernelDensity:
    x_grid: Grid1D
    xp_grid: Grid1D
    values: np.ndarray
    p_grid: Grid1D
    aliasing_warning: bool = False

    def hermiticity_defect(self) -> float:
        """max |rho_hat(x, -x') - conj rho_hat(x, x')| over grid points whose mirror is on the grid."""
        v = self.values
        n = v.shape[1]
        j = np.arange(1, n)
        return float(np.max(np.abs(v[:, n - j] - np.conj(v[:, j])))) if n > 1 else 0.0


def _kernel_axes(gp: Grid1D, hbar: float) -> tuple[Grid1D, np.ndarray]:
    n = gp.n
    dxp = math.pi * hbar / (n * gp.dx)
    xp = Grid1D(n, -(n // 2) * dxp, dxp)
    phase = np.exp(2j * gp.x0 * xp.coords / hbar)
    return xp, phase


def kernel_transform(rho: PhaseSpaceDensity, hbar: float = 1.0) -> KernelDensity:
    """Discrete ``int exp(2i p x'/hbar) rho dp`` on the x' grid conjugate to the momentum grid.

    The discrete pair is exactly invertible (see ``inverse_kernel_transform``).
    """
    gp = rho.grid.gp
    n = gp.n
    edge = max(float(np.max(np.abs(rho.values[:, 0]))), float(np.max(np.abs(rho.values[:, -1]))))
    alias = edge > 1e-9
    if alias:
        warnings.warn(f"density does not decay at the momentum edges ({edge:.3g}); transform will alias", RuntimeWarning, stacklevel=2)
    xp, phase = _kernel_axes(gp, hbar)
    k = np.arange(n)
    # exp(2i p_k x'_j / hbar) = phase_j * exp(2 pi i k (j - n//2) / n)
    shift = np.exp(-2j * np.pi * k * (n // 2) / n)
    vals = np.fft.ifft(rho.values * shift, axis=1) * n * gp.dx
    vals = vals * phase[None, :]
    return KernelDensity(rho.grid.gx, xp, vals, gp, alias)


def inverse_kernel_transform(kd: KernelDensity, hbar: float = 1.0) -> PhaseSpaceDensity:
    gp = kd.p_grid
    n = gp.n
    _, phase = _kernel_axes(gp, hbar)
    k = np.arange(n)
    shift = np.exp(-2j * np.pi * k * (n // 2) / n)
    vals = np.fft.fft(kd.values / phase[None, :], axis=1) / (n * gp.dx) / shift
    return PhaseSpaceDensity(Grid2D(kd.x_grid, gp), vals.real)


def default_momentum_grid(psi: WaveFunction, sys: SystemParams = SystemParams(), n: int = 256, width: float = 8.0) -> Grid1D:
    p0 = expectation(psi, "p", sys=sys)
    sp = spread(psi, "p", sys)
    return Grid1D.from_bounds(p0 - width * sp, p0 + width * sp, n)


def _pair_correlation(states: Sequence[np.ndarray], weights: Sequence[float], n: int) -> np.ndarray:
    """c[i, j] = sum_s w_s conj(psi_s(x_i - y_j)) psi_s(x_i + y_j), y_j = (j - (n-1)) dx."""
    i = np.arange(n)[:, None]
    j = np.arange(-(n - 1), n)[None, :]
    ip, im = i + j, i - j
    ok = (ip >= 0) & (ip < n) & (im >= 0) & (im < n)
    ipc, imc = np.where(ok, ip, 0), np.where(ok, im, 0)
    c = np.zeros((n, 2 * n - 1), dtype=complex)
    for w, v in zip(weights, states):
        c += w * np.where(ok, np.conj(v[imc]) * v[ipc], 0.0)
    return c


def _wigner(states, weights, grid: Grid1D, p_grid: Grid1D, sys: SystemParams) -> np.ndarray:
    n = grid.n
    period = math.pi * sys.hbar / grid.dx
    if p_grid.x_max - p_grid.x0 >= period:
        raise InputShapeError(f"momentum window {p_grid.x_max - p_grid.x0:.4g} exceeds the alias-free span pi*hbar/dx = {period:.4g}; refine the position grid")
    c = _pair_correlation(states, weights, n)
    y = np.arange(-(n - 1), n) * grid.dx
    kern = np.exp(-2j * np.outer(y, p_grid.coords) / sys.hbar)
    return (c @ kern).real * grid.dx / (math.pi * sys.hbar)


def wigner_from_wavefunction(psi: WaveFunction, sys: SystemParams = SystemParams(), p_grid: Grid1D | None = None) -> PhaseSpaceDensity:
    """Phase-space density whose kernel is conj(psi(x - x')) psi(x + x')."""
    if abs(psi.norm - 1.0) > 1e-8:
        raise InvariantViolation(f"wavefunction norm is {psi.norm!r}, expected 1")
    p_grid = p_grid or default_momentum_grid(psi, sys)
    W = _wigner([psi.values], [1.0], psi.grid, p_grid, sys)
    return PhaseSpaceDensity(Grid2D(psi.grid, p_grid), W)


def thermal_weights(omega: float, kT: float, hbar: float = 1.0, cutoff: float = 1e-10) -> np.ndarray:
    """Boltzmann weights exp(-E_n/kT)/Z, truncated once the cumulative weight reaches 1 - cutoff."""
    q = math.exp(-hbar * omega / kT)
    n_max = max(0, int(math.ceil(math.log(cutoff) / math.log(q))) - 1) if q > 0 else 0
    w = (1 - q) * q ** np.arange(n_max + 1)
    return w / w.sum()


def thermal_density(grid: Grid2D, sys: SystemParams, omega: float, kT: float, center: float = 0.0) -> PhaseSpaceDensity:
    """Boltzmann mixture of harmonic eigenstates, built state by state on the grid."""
    w = thermal_weights(omega, kT, sys.hbar)
    funcs = hermite_functions(grid.gx, len(w) - 1, sys, omega, center)
    W = _wigner(list(funcs), list(w), grid.gx, grid.gp, sys)
    return PhaseSpaceDensity(grid, W)


# ---------------------------------------------------------------- dynamics


def flow_matrix(V: QuadraticPotential, sys: SystemParams, t: float) -> np.ndarray:
    """Affine phase flow (x, p, 1) -> (x(t), p(t), 1) of H = p^2/2m + V."""
    _require_quadratic(V)
    G = np.array([[0.0, 1.0 / sys.mass, 0.0], [-2.0 * V.a2, 0.0, -V.a1], [0.0, 0.0, 0.0]])
    return linalg.expm(G * t)


def liouville_evolve(rho: PhaseSpaceDensity, V: QuadraticPotential, sys: SystemParams, t: float, order: int = 3) -> PhaseSpaceDensity:
    """rho_t(z) = rho_0(flow_{-t}(z)), sampled with cubic-spline interpolation."""
    _require_quadratic(V)
    M = flow_matrix(V, sys, -t)
    X, P = rho.grid.mesh()
    xs = M[0, 0] * X + M[0, 1] * P + M[0, 2]
    ps = M[1, 0] * X + M[1, 1] * P + M[1, 2]
    gx, gp = rho.grid.gx, rho.grid.gp
    coords = np.array([(xs - gx.x0) / gx.dx, (ps - gp.x0) / gp.dx])
    vals = ndimage.map_coordinates(rho.values, coords, order=order, mode="constant", cval=0.0, prefilter=True)
    return PhaseSpaceDensity(rho.grid, vals)


def max_phase_steps(grid: Grid1D, V: QuadraticPotential, sys: SystemParams, dt: float) -> tuple[float, float]:
    """Largest kinetic and potential phase advance per step on this grid."""
    k_nyq = math.pi / grid.dx
    kin = sys.hbar * k_nyq**2 * dt / (2 * sys.mass)
    v = V(grid.coords)
    pot = float(v.max() - v.min()) * dt / sys.hbar
    return kin, pot


def stable_step(grid: Grid1D, V: QuadraticPotential, sys: SystemParams, max_phase: float = 0.1) -> float:
    kin, pot = max_phase_steps(grid, V, sys, 1.0)
    return max_phase / max(kin, pot)


def _plan(t: float, dt: float | None, grid, V, sys, max_phase) -> tuple[int, float]:
    if dt is None:
        dt = stable_step(grid, V, sys, max_phase)
        n = max(1, int(math.ceil(abs(t) / dt)))
    else:
        if not dt > 0:
            raise ValueError("dt must be positive")
        n = max(1, int(math.ceil(abs(t) / dt - 1e-9)))
    h = t / n
    kin, pot = max_phase_steps(grid, V, sys, abs(h))
    if max(kin, pot) >= max_phase:
        raise StabilityError(
            f"dt = {abs(h):.3g} gives phase steps kinetic {kin:.3g}, potential {pot:.3g} rad (limit {max_phase})"
        )
    return n, h


class SplitStepper:
    """Strang split-step Fourier propagator for one time step ``h``.

    Both factors are pure phases so every step is unitary on the grid.
    """

    def __init__(self, grid: Grid1D, V: QuadraticPotential, sys: SystemParams, h: float):
        k = 2 * np.pi * np.fft.fftfreq(grid.n, d=grid.dx)
        self.kin = np.exp(-1j * sys.hbar * k * k * h / (2 * sys.mass))
        v = V(grid.coords)
        self.half_pot = np.exp(-0.5j * v * h / sys.hbar)
        self.pot = self.half_pot * self.half_pot

    def advance(self, psi: np.ndarray, steps: int) -> np.ndarray:
        fft, ifft, kin, pot = np.fft.fft, np.fft.ifft, self.kin, self.pot
        psi = psi * self.half_pot
        for _ in range(steps - 1):
            psi = ifft(kin * fft(psi)) * pot
        psi = ifft(kin * fft(psi)) * self.half_pot
        return psi


def schrodinger_evolve(
    psi: WaveFunction,
    V: QuadraticPotential,
    sys: SystemParams,
    t: float,
    dt: float | None = None,
    max_phase: float = 0.1,
) -> WaveFunction:
    """Second-order split-step evolution; ``dt`` defaults to the largest stable step."""
    _require_quadratic(V)
    n, h = _plan(t, dt, psi.grid, V, sys, max_phase)
    out = SplitStepper(psi.grid, V, sys, h).advance(psi.values, n)
    return WaveFunction(psi.grid, out)


def schrodinger_samples(
    psi: WaveFunction,
    V: QuadraticPotential,
    sys: SystemParams,
    t: float,
    sample_dt: float,
    dt: float | None = None,
    max_phase: float = 0.1,
):
    """Evolve to ``t`` and yield ``(time, WaveFunction)`` every ``sample_dt`` (rounded to whole steps), t = 0 included."""
    _require_quadratic(V)
    n_samples = max(1, int(round(t / sample_dt)))
    h_target = abs(t) / n_samples
    if dt is None:
        dt = stable_step(psi.grid, V, sys, max_phase)
    per = max(1, int(math.ceil(h_target / dt - 1e-9)))
    _, h = _plan(t / n_samples, (t / n_samples) / per, psi.grid, V, sys, max_phase)
    stepper = SplitStepper(psi.grid, V, sys, h)
    cur = psi.values
    yield 0.0, psi
    for s in range(1, n_samples + 1):
        cur = stepper.advance(cur, per)
        yield s * t / n_samples, WaveFunction(psi.grid, cur)


def ehrenfest_check(
    psi0: WaveFunction,
    V: QuadraticPotential,
    sys: SystemParams,
    t_span,
    dt: float | None = None,
    sample_dt: float = 0.01,
) -> float:
    """max over interior sample times of |centered d<p>/dt - <F>|."""
    t = t_span[1] - t_span[0] if isinstance(t_span, (tuple, list)) else float(t_span)
    ts, ps, fs = [], [], []
    for tt, psi in schrodinger_samples(psi0, V, sys, t, sample_dt, dt):
        ts.append(tt)
        ps.append(expectation(psi, "p", sys=sys))
        fs.append(float(np.sum(V.force(psi.grid.coords) * psi.density) * psi.grid.dx))
    ts, ps, fs = map(np.asarray, (ts, ps, fs))
    if len(ts) < 3:
        raise ValueError("need at least three samples for a centered difference")
    dp = (ps[2:] - ps[:-2]) / (ts[2:] - ts[:-2])
    return float(np.max(np.abs(dp - fs[1:-1])))


@dataclass(frozen=True)
class CorrespondenceReport:
    t: float
    l1: float
    x_gap: float
    p_gap: float
    liouville_norm: float
    wigner_min: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def correspondence_check(
    psi0: WaveFunction,
    V: QuadraticPotential,
    sys: SystemParams,
    t: float,
    dt: float | None = None,
    p_grid: Grid1D | None = None,
) -> tuple[CorrespondenceReport, PhaseSpaceDensity, PhaseSpaceDensity]:
    """Evolve Wigner(psi0) by Liouville and psi0 by Schrodinger; compare at ``t``.

    Returns the report, the Liouville density and the Wigner density of psi_t.
    """
    _require_quadratic(V)
    psi_t = schrodinger_evolve(psi0, V, sys, t, dt) if t != 0 else psi0
    if p_grid is None:
        lo, hi = [], []
        for s in (psi0, psi_t):
            c, w = expectation(s, "p", sys=sys), 8 * spread(s, "p", sys)
            lo.append(c - w)
            hi.append(c + w)
        p_grid = Grid1D.from_bounds(min(lo), max(hi), psi0.grid.n)
    rho0 = wigner_from_wavefunction(psi0, sys, p_grid)
    rho_t = liouville_evolve(rho0, V, sys, t) if t != 0 else rho0
    w_t = wigner_from_wavefunction(psi_t, sys, p_grid)
    l1 = integrate2d(np.abs(rho_t.values - w_t.values), rho_t.grid)
    report = CorrespondenceReport(
        t=float(t),
        l1=l1,
        x_gap=abs(expectation(rho_t, "x", sys=sys) - expectation(psi_t, "x", sys=sys)),
        p_gap=abs(expectation(rho_t, "p", sys=sys) - expectation(psi_t, "p", sys=sys)),
        liouville_norm=rho_t.norm,
        wigner_min=w_t.minimum,
    )
    return report, rho_t, w_t
