"""Two-component Pauli evolution, Larmor precession and Stern-Gerlach sampling.

Hamiltonian (Gaussian units, g = 2)::

    H = (p - e A/c)^2 / 2m + e phi - (e hbar / 2 m c) sigma . B

Spatial spinors live on a line along x; only the transverse part of A may be
nonzero there, and it enters as the scalar term e^2 |A|^2 / (2 m c^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvariantViolation, StabilityError, UnsupportedPotential
from .numerics import Grid1D, RngStream
from .phase_space import SystemParams

SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
_CHUNK = 1 << 16


def _unit(v, what="axis") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"{what} must be a 3-vector")
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise ValueError(f"{what} must have unit length, got |n| = {np.linalg.norm(v)!r}")
    return v


@dataclass(frozen=True)
class MeasurementAxis:
    n: tuple

    def __post_init__(self):
        object.__setattr__(self, "n", tuple(float(c) for c in _unit(self.n)))

    @classmethod
    def from_angles(cls, theta: float, phi: float = 0.0) -> "MeasurementAxis":
        v = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
        return cls(tuple(v / np.linalg.norm(v)))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.n)


@dataclass(frozen=True)
class SpinorField:
    """Spinor components; ``grid=None`` means a spatially homogeneous (pure spin) state."""

    up: np.ndarray
    down: np.ndarray
    grid: Grid1D | None = None

    def __post_init__(self):
        up = np.asarray(self.up, dtype=complex)
        down = np.asarray(self.down, dtype=complex)
        if up.shape != down.shape:
            raise ValueError("components must have the same shape")
        if self.grid is None and up.shape != ():
            raise ValueError("homogeneous spinor components must be scalars")
        if self.grid is not None and up.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples per component, got {up.shape}")
        object.__setattr__(self, "up", up)
        object.__setattr__(self, "down", down)
        if abs(self.norm - 1.0) > 1e-8:
            raise InvariantViolation(f"spinor norm is {self.norm!r}, expected 1")

    @property
    def homogeneous(self) -> bool:
        return self.grid is None

    @property
    def norm(self) -> float:
        d = np.abs(self.up) ** 2 + np.abs(self.down) ** 2
        if self.grid is None:
            return float(d)
        return float(d.sum() * self.grid.dx)

    @classmethod
    def along(cls, axis, grid: Grid1D | None = None, spatial=None) -> "SpinorField":
        """Spin-up along ``axis``, optionally times a normalized spatial profile."""
        n = _unit(getattr(axis, "vector", axis))
        theta = math.acos(max(-1.0, min(1.0, n[2])))
        phi = math.atan2(n[1], n[0])
        u, d = math.cos(theta / 2), math.sin(theta / 2) * complex(math.cos(phi), math.sin(phi))
        if grid is None:
            return cls(np.complex128(u), np.complex128(d))
        f = np.asarray(spatial, dtype=complex)
        f = f / math.sqrt(float(np.sum(np.abs(f) ** 2)) * grid.dx)
        return cls(u * f, d * f, grid)

    def components(self) -> np.ndarray:
        return np.stack([np.atleast_1d(self.up), np.atleast_1d(self.down)])

    def spin_expectation(self) -> np.ndarray:
        """(<sigma_x>, <sigma_y>, <sigma_z>)."""
        chi = self.components()
        w = 1.0 if self.grid is None else self.grid.dx
        return np.array([float(np.real(np.sum(np.conj(chi) * (s @ chi))) * w) for s in SIGMA])


def _curl(A: Callable, r: np.ndarray, h: float) -> np.ndarray:
    """Central-difference curl of ``A`` at points ``r`` (shape (..., 3))."""
    J = np.empty(r.shape[:-1] + (3, 3))
    for j in range(3):
        dr = np.zeros(3)
        dr[j] = h
        J[..., :, j] = (np.asarray(A(r + dr)) - np.asarray(A(r - dr))) / (2 * h)
    return np.stack([J[..., 2, 1] - J[..., 1, 2], J[..., 0, 2] - J[..., 2, 0], J[..., 1, 0] - J[..., 0, 1]], axis=-1)


@dataclass(frozen=True)
class EMField:
    """Applied potentials. ``A_vec`` maps points of shape (..., 3) to vectors of the same shape.

    With only ``B_uniform`` given, the symmetric gauge A = B x r / 2 is used.
    When both are given their consistency (curl A = B) is checked on a small
    lattice around the origin.
    """

    phi: Callable | None = None
    A_vec: Callable | None = None
    B_uniform: tuple | None = None
    e: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("c must be positive")
        if self.B_uniform is not None:
            B = np.asarray(self.B_uniform, dtype=float)
            if B.shape != (3,) or not np.all(np.isfinite(B)):
                raise ValueError("B_uniform must be a finite 3-vector")
            object.__setattr__(self, "B_uniform", tuple(float(b) for b in B))
            if self.A_vec is None:
                object.__setattr__(self, "A_vec", lambda r, B=B: 0.5 * np.cross(B, np.asarray(r, dtype=float)))
            else:
                pts = np.stack(np.meshgrid(*[np.linspace(-1, 1, 3)] * 3, indexing="ij"), axis=-1).reshape(-1, 3)
                curl = _curl(self.A_vec, pts, 1e-3)
                scale = max(1.0, float(np.linalg.norm(B)))
                if np.max(np.abs(curl - B)) > 1e-6 * scale:
                    raise InvariantViolation("curl of A_vec does not match B_uniform")

    def B_at(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.B_uniform is not None:
            return np.broadcast_to(np.array(self.B_uniform), r.shape).copy()
        if self.A_vec is None:
            return np.zeros(r.shape)
        return _curl(self.A_vec, r, 1e-4)

    def A_at(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return np.zeros(r.shape) if self.A_vec is None else np.asarray(self.A_vec(r), dtype=float)

    def phi_at(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape) if self.phi is None else np.asarray(self.phi(x), dtype=float)


def larmor_frequency(B_magnitude: float, sys: SystemParams = SystemParams(), e: float = 1.0, c: float = 1.0) -> float:
    return abs(e) * B_magnitude / (sys.mass * c)


def zeeman_splitting(B_magnitude: float, sys: SystemParams = SystemParams(), e: float = 1.0, c: float = 1.0) -> float:
    """Gap between the two spin eigenstates of -(e hbar/2mc) sigma.B."""
    if B_magnitude < 0:
        raise ValueError("B magnitude must be non-negative")
    return abs(e) * sys.hbar * B_magnitude / (sys.mass * c)


def _spin_rotation(b: np.ndarray, h: float, hbar: float) -> np.ndarray:
    """exp(-i (b . sigma) h / hbar) for fields b of shape (..., 3); returns (..., 2, 2)."""
    mag = np.linalg.norm(b, axis=-1)
    theta = mag * h / hbar
    with np.errstate(invalid="ignore", divide="ignore"):
        nhat = np.where(mag[..., None] > 0, b / np.where(mag > 0, mag, 1.0)[..., None], 0.0)
    cos, sin = np.cos(theta), np.sin(theta)
    U = cos[..., None, None] * np.eye(2) - 1j * sin[..., None, None] * np.einsum("...k,kij->...ij", nhat, SIGMA)
    return U


class _PauliStepper:
    def __init__(self, spinor: SpinorField, em: EMField, sys: SystemParams, h: float):
        self.homogeneous = spinor.homogeneous
        coupling = -em.e * sys.hbar / (2 * sys.mass * em.c)
        if self.homogeneous:
            b = coupling * em.B_at(np.zeros(3))
            self.U = _spin_rotation(b, h, sys.hbar)
            self.max_phase = float(np.linalg.norm(b)) * abs(h) / sys.hbar
            return
        g = spinor.grid
        r = np.zeros((g.n, 3))
        r[:, 0] = g.coords
        A = em.A_at(r)
        if np.max(np.abs(A[:, 0])) > 1e-12:
            raise UnsupportedPotential("A along the propagation axis must vanish on the grid line")
        V = em.e * em.phi_at(g.coords) + em.e**2 * np.sum(A**2, axis=1) / (2 * sys.mass * em.c**2)
        b = coupling * em.B_at(r)
        k = 2 * np.pi * np.fft.fftfreq(g.n, d=g.dx)
        self.kin = np.exp(-1j * sys.hbar * k * k * h / (2 * sys.mass))
        half_v = np.exp(-0.5j * V * h / sys.hbar)
        self.half = _spin_rotation(b, h / 2, sys.hbar) * half_v[:, None, None]
        self.spin_trivial = not np.any(b)
        self.half_scalar = half_v
        kin_phase = sys.hbar * (math.pi / g.dx) ** 2 * abs(h) / (2 * sys.mass)
        pot_phase = (float(V.max() - V.min()) + 2 * float(np.max(np.linalg.norm(b, axis=1)))) * abs(h) / sys.hbar
        self.max_phase = max(kin_phase, pot_phase)

    def _half(self, chi):
        if self.spin_trivial:
            return chi * self.half_scalar
        return np.einsum("xij,jx->ix", self.half, chi)

    def advance(self, chi: np.ndarray, steps: int) -> np.ndarray:
        if self.homogeneous:
            return np.linalg.matrix_power(self.U, steps) @ chi if steps > 1 else self.U @ chi
        fft, ifft, kin = np.fft.fft, np.fft.ifft, self.kin
        for _ in range(steps):
            chi = self._half(chi)
            chi = ifft(kin * fft(chi, axis=1), axis=1)
            chi = self._half(chi)
        return chi


def _plan(spinor, em, sys, t, dt, max_phase):
    if not dt > 0:
        raise ValueError("dt must be positive")
    n = max(1, int(math.ceil(abs(t) / dt - 1e-9)))
    h = t / n
    stepper = _PauliStepper(spinor, em, sys, h)
    if stepper.max_phase >= max_phase:
        raise StabilityError(f"step {abs(h):.3g} advances the phase by {stepper.max_phase:.3g} rad (limit {max_phase})")
    return n, h, stepper


def _wrap(chi: np.ndarray, like: SpinorField) -> SpinorField:
    if like.homogeneous:
        return SpinorField(chi[0, 0] if chi.ndim == 2 else chi[0], chi[1, 0] if chi.ndim == 2 else chi[1])
    return SpinorField(chi[0], chi[1], like.grid)


def pauli_evolve(spinor: SpinorField, em: EMField, sys: SystemParams, t: float, dt: float, max_phase: float = 0.1) -> SpinorField:
    """Evolve to time ``t`` in whole steps of at most ``dt``.

    Homogeneous spinors are stepped with the exact 2x2 propagator; spatial ones
    with a Strang split of kinetic and (potential + spin) factors.
    """
    n, _, stepper = _plan(spinor, em, sys, t, dt, max_phase)
    chi = stepper.advance(spinor.components(), n)
    return _wrap(chi, spinor)


@dataclass(frozen=True)
class SpinHistory:
    t: np.ndarray
    sigma: np.ndarray  # (n, 3)
    norm: np.ndarray

    def rows(self):
        for t, s, nm in zip(self.t, self.sigma, self.norm):
            yield float(t), float(s[0]), float(s[1]), float(s[2]), float(nm)


def spin_history(spinor: SpinorField, em: EMField, sys: SystemParams, t: float, dt: float, max_phase: float = 0.1) -> SpinHistory:
    """Spin expectation and norm after every step, t = 0 included."""
    n, h, stepper = _plan(spinor, em, sys, t, dt, max_phase)
    chi = spinor.components()
    ts, sig, nm = [0.0], [spinor.spin_expectation()], [spinor.norm]
    for i in range(1, n + 1):
        chi = stepper.advance(chi, 1)
        s = _wrap(chi, spinor)
        ts.append(i * h)
        sig.append(s.spin_expectation())
        nm.append(s.norm)
    return SpinHistory(np.array(ts), np.array(sig), np.array(nm))


def fit_precession(history: SpinHistory, axis) -> float:
    """Angular frequency of the spin's rotation about ``axis``, from a least-squares fit of the unwrapped azimuth."""
    n = _unit(np.asarray(axis, dtype=float) / np.linalg.norm(axis))
    trial = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = np.cross(n, trial)
    u /= np.linalg.norm(u)
    v = np.cross(n, u)
    phase = np.unwrap(np.arctan2(history.sigma @ v, history.sigma @ u))
    slope = np.polyfit(history.t, phase, 1)[0]
    return float(abs(slope))


def spin_probability(spinor: SpinorField, axis: MeasurementAxis) -> float:
    """Born weight of the +1 outcome along ``axis``: (1 + n.<sigma>)/2."""
    p = 0.5 * (1.0 + float(axis.vector @ spinor.spin_expectation()))
    return min(1.0, max(0.0, p))


def stern_gerlach_sample(spinor: SpinorField, axis: MeasurementAxis, n_trials: int, rng: RngStream) -> tuple[int, int]:
    """Dichotomic outcomes; chunk i uses child stream i so counts do not depend on chunking elsewhere."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    p = spin_probability(spinor, axis)
    plus = 0
    for i, start in enumerate(range(0, n_trials, _CHUNK)):
        m = min(_CHUNK, n_trials - start)
        plus += int(np.count_nonzero(rng.spawn(i).generator().random(m) < p))
    return plus, n_trials - plus
