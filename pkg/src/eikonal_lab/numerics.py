"""Grids, quadrature, adaptive ODE stepping, finite differences and seeded streams.

Everything here is a pure function of its inputs. All arithmetic is float64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InputShapeError, IntegrationError

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid ``x0 + i*dx`` for ``i = 0..n-1``."""

    n: int
    x0: float
    dx: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"grid needs n >= 2 points, got {self.n}")
        if not (self.dx > 0 and math.isfinite(self.dx)):
            raise ValueError(f"grid spacing must be positive, got {self.dx}")
        if not math.isfinite(self.x0):
            raise ValueError("grid origin must be finite")

    @classmethod
    def from_bounds(cls, lo: float, hi: float, n: int) -> "Grid1D":
        return cls(int(n), float(lo), (float(hi) - float(lo)) / (int(n) - 1))

    @property
    def coords(self) -> np.ndarray:
        return self.x0 + np.arange(self.n) * self.dx

    @property
    def x_max(self) -> float:
        return self.x0 + (self.n - 1) * self.dx

    @property
    def length(self) -> float:
        return (self.n - 1) * self.dx

    def to_dict(self) -> dict:
        return {"n": self.n, "x0": self.x0, "dx": self.dx}


@dataclass(frozen=True)
class Grid2D:
    """Phase-space grid: position axis ``gx`` by momentum axis ``gp``."""

    gx: Grid1D
    gp: Grid1D

    @property
    def shape(self) -> tuple[int, int]:
        return (self.gx.n, self.gp.n)

    @property
    def cell(self) -> float:
        return self.gx.dx * self.gp.dx

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.gx.coords, self.gp.coords, indexing="ij")

    def to_dict(self) -> dict:
        return {"gx": self.gx.to_dict(), "gp": self.gp.to_dict()}


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class RngStream:
    """Keyed Philox4x64-10 stream.

    Philox is counter based: the 128-bit key is ``(seed, stream_id)`` and the
    n-th draw depends only on the key and n. Equal keys give bitwise-equal
    sequences on every platform; distinct stream ids are independent streams.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if int(v) != v or not (0 <= v <= _MASK64):
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def spawn(self, index: int) -> "RngStream":
        """Child stream number ``index``; same seed, derived stream id."""
        child = _splitmix64(self.stream_id ^ _splitmix64(int(index) + 1))
        return RngStream(self.seed, child)


def trapezoid_integrate(f, grid: Grid1D) -> float:
    f = np.asarray(f)
    if f.ndim != 1 or f.shape[0] != grid.n:
        raise InputShapeError(f"expected {grid.n} samples, got shape {f.shape}")
    return float(grid.dx * (f.sum() - 0.5 * (f[0] + f[-1])))


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


@dataclass(frozen=True)
class ODESolution:
    t: np.ndarray
    y: np.ndarray
    n_steps: int
    n_rejected: int

    @property
    def y_final(self):
        return self.y[-1]


def ode_solve(
    rhs: Callable,
    y0,
    t_span: Sequence[float],
    tol: float,
    *,
    atol: float | None = None,
    t_eval: Sequence[float] | None = None,
    h0: float | None = None,
    max_steps: int = 1_000_000,
) -> ODESolution:
    """Adaptive embedded Runge-Kutta 5(4) (Dormand-Prince) integration.

    The 4th-order embedded solution drives step-size control; the local
    error per step is kept below ``atol + tol*|y|`` (``atol`` defaults to
    ``tol``; pass ``atol=0`` for pure relative control of a signed-definite y).

    With ``t_eval`` the solution is returned exactly at those times (steps are
    clipped to land on them); otherwise every accepted step is returned.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    atol = tol if atol is None else float(atol)
    t0, t1 = float(t_span[0]), float(t_span[1])
    direction = 1.0 if t1 >= t0 else -1.0
    y = np.array(y0, dtype=np.float64)
    scalar = y.ndim == 0

    if t_eval is None:
        stops = [t1]
        keep_all = True
    else:
        stops = [float(s) for s in t_eval]
        if any((s - t0) * direction < 0 or (t1 - s) * direction < 0 for s in stops):
            raise ValueError("t_eval points must lie inside t_span")
        if any((b - a) * direction < 0 for a, b in zip(stops, stops[1:])):
            raise ValueError("t_eval must be monotone in the integration direction")
        keep_all = False

    ts, ys = [t0], [y.copy()]
    if t0 == t1:
        out_t = np.array([t0] * (len(stops) if not keep_all else 1))
        out_y = np.array([y] * len(out_t))
        return ODESolution(out_t, out_y, 0, 0)

    def f(t, yy):
        v = np.asarray(rhs(t, float(yy) if scalar else yy), dtype=np.float64)
        if not np.all(np.isfinite(v)):
            raise IntegrationError("non-finite right-hand side", t_last)
        return v

    t = t0
    t_last = t0
    k1 = f(t, y)
    if h0 is None:
        scale = atol + tol * np.abs(y)
        d0 = np.sqrt(np.mean((y / scale) ** 2))
        d1 = np.sqrt(np.mean((k1 / scale) ** 2))
        h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
        h = min(h, abs(t1 - t0))
    else:
        h = abs(h0)

    n_steps = n_rej = 0
    out_t, out_y = [], []
    stop_i = 0
    # t_eval points coinciding with t0
    while not keep_all and stop_i < len(stops) and stops[stop_i] == t0:
        out_t.append(t0)
        out_y.append(y.copy())
        stop_i += 1

    while (keep_all and t != t1) or (not keep_all and stop_i < len(stops)):
        target = t1 if keep_all else stops[stop_i]
        if n_steps + n_rej >= max_steps:
            raise IntegrationError("step budget exhausted", t_last)
        if h < 16 * np.finfo(float).eps * max(1.0, abs(t)):
            raise IntegrationError("step size underflow", t_last)
        hit = False
        if h >= abs(target - t):
            h_try = abs(target - t)
            hit = True
        else:
            h_try = h
        hs = direction * h_try
        ks = [k1]
        for i in range(1, 7):
            yi = y + hs * sum(a * k for a, k in zip(_A[i], ks))
            ks.append(f(t + _C[i] * hs, yi))
        y_new = y + hs * sum(b * k for b, k in zip(_B5, ks) if b != 0.0)
        err = hs * sum(e * k for e, k in zip(_E, ks) if e != 0.0)
        scale = atol + tol * np.maximum(np.abs(y), np.abs(y_new))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(scale > 0, np.abs(err) / scale, np.where(err == 0, 0.0, np.inf))
        err_norm = float(np.sqrt(np.mean(ratio**2)))
        if err_norm <= 1.0:
            n_steps += 1
            t = target if hit else t + hs
            y = y_new
            k1 = ks[6]
            t_last = t
            if keep_all:
                ts.append(t)
                ys.append(y.copy())
            elif hit:
                out_t.append(t)
                out_y.append(y.copy())
                stop_i += 1
                while stop_i < len(stops) and stops[stop_i] == t:
                    out_t.append(t)
                    out_y.append(y.copy())
                    stop_i += 1
            fac = 5.0 if err_norm == 0 else min(5.0, max(0.2, 0.9 * err_norm ** -0.2))
            # a clipped landing step says nothing about the natural step size
            h = max(h, h_try * fac) if hit else h_try * fac
        else:
            n_rej += 1
            h = h_try * max(0.2, 0.9 * err_norm ** -0.2)

    if keep_all:
        return ODESolution(np.array(ts), np.array(ys), n_steps, n_rej)
    return ODESolution(np.array(out_t), np.array(out_y), n_steps, n_rej)


# integer weights (scaled by 12) so constants differentiate to exactly zero
_D1_EDGE = (
    np.array([-25.0, 48.0, -36.0, 16.0, -3.0]),
    np.array([-3.0, -10.0, 18.0, -6.0, 1.0]),
)
_D2_EDGE = (
    np.array([35.0, -104.0, 114.0, -56.0, 11.0]),
    np.array([11.0, -20.0, 6.0, 4.0, -1.0]),
)


def derivative(f, grid: Grid1D, order: int = 1) -> np.ndarray:
    """4th-order central differences inside, 5-point one-sided stencils at the two edge points."""
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order!r}")
    f = np.asarray(f)
    if f.ndim != 1 or f.shape[0] != grid.n:
        raise InputShapeError(f"expected {grid.n} samples, got shape {f.shape}")
    if grid.n < 5:
        raise InputShapeError("derivative needs at least 5 samples")
    h = grid.dx
    out = np.empty(f.shape, dtype=np.result_type(f, np.float64))
    if order == 1:
        out[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
        edge, sign, power = _D1_EDGE, -1.0, 1
    else:
        out[2:-2] = (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / (12 * h * h)
        edge, sign, power = _D2_EDGE, 1.0, 2
    hp = 12.0 * h**power
    out[0] = edge[0] @ f[:5] / hp
    out[1] = edge[1] @ f[:5] / hp
    # mirrored stencils at the right edge; odd derivatives flip sign
    out[-1] = sign * (edge[0] @ f[::-1][:5]) / hp
    out[-2] = sign * (edge[1] @ f[::-1][:5]) / hp
    return out
