"""Spin correlations, the three-axis Bell inequality and local hidden-variable Monte Carlo.

Inequality checked: ``1 + P(b, c) >= |P(a, b) - P(a, c)|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .numerics import RngStream

CHUNK = 1 << 17
TIE_ATOL = 1e-12  # analytic equality cases differ only by rounding


def _unit(v, what: str = "axis") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"{what} must be a 3-vector")
    if abs(float(np.linalg.norm(v)) - 1.0) > 1e-12:
        raise ValueError(f"{what} must have unit length, got |{what}| = {np.linalg.norm(v)!r}")
    return v


def coplanar_axis(theta: float) -> np.ndarray:
    """Unit vector in the x-z plane at angle ``theta`` from z."""
    return np.array([math.sin(theta), 0.0, math.cos(theta)])


@dataclass(frozen=True)
class AnalyzerAxes:
    a: tuple
    b: tuple
    c: tuple

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, tuple(float(x) for x in _unit(getattr(self, name), name)))

    @classmethod
    def coplanar(cls, theta_a: float, theta_b: float, theta_c: float) -> "AnalyzerAxes":
        return cls(*(tuple(coplanar_axis(t)) for t in (theta_a, theta_b, theta_c)))


def qm_correlation(a, b) -> float:
    """Singlet spin correlation -a.b."""
    return -float(np.clip(_unit(a, "a") @ _unit(b, "b"), -1.0, 1.0))


def bell_inequality(axes: AnalyzerAxes, P: Callable, atol: float = TIE_ATOL) -> tuple[float, float, bool]:
    """(lhs, rhs, satisfied) for 1 + P(b, c) >= |P(a, b) - P(a, c)|, ties within ``atol`` counting as satisfied."""
    a, b, c = (np.array(v) for v in (axes.a, axes.b, axes.c))
    lhs = 1.0 + float(P(b, c))
    rhs = abs(float(P(a, b)) - float(P(a, c)))
    return lhs, rhs, bool(lhs + atol >= rhs)


def sign_correlation(a, b) -> float:
    """Exact sign-model correlation -1 + 2 theta/pi."""
    cos = float(np.clip(_unit(a, "a") @ _unit(b, "b"), -1.0, 1.0))
    return -1.0 + 2.0 * math.acos(cos) / math.pi


def _sign(x: np.ndarray) -> np.ndarray:
    # sign(0) = +1 keeps every outcome dichotomic
    return np.where(x >= 0, 1, -1).astype(np.int8)


def sphere_sampler(rng: RngStream, n: int) -> np.ndarray:
    v = rng.generator().standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def antiparallel_sampler(rng: RngStream, n: int, axis=(0.0, 0.0, 1.0)) -> np.ndarray:
    """lambda = +axis or -axis with equal probability."""
    s = np.where(rng.generator().random(n) < 0.5, 1.0, -1.0)
    return s[:, None] * np.asarray(axis, dtype=float)[None, :]


def response_sign_A(axis, lam: np.ndarray) -> np.ndarray:
    return _sign(lam @ np.asarray(axis, dtype=float))


def response_sign_B(axis, lam: np.ndarray) -> np.ndarray:
    return -_sign(lam @ np.asarray(axis, dtype=float))


@dataclass(frozen=True)
class HiddenVariableModel:
    """Local model: each response sees only its own axis and the shared lambda."""

    name: str
    lambda_sampler: Callable[[RngStream, int], np.ndarray]
    response_A: Callable[[np.ndarray, np.ndarray], np.ndarray]
    response_B: Callable[[np.ndarray, np.ndarray], np.ndarray]
    exact: Callable | None = field(default=None, compare=False)


SIGN_MODEL = HiddenVariableModel("sign", sphere_sampler, response_sign_A, response_sign_B, sign_correlation)
ANTIPARALLEL_MODEL = HiddenVariableModel("antiparallel", antiparallel_sampler, response_sign_A, response_sign_B)
MODELS = {m.name: m for m in (SIGN_MODEL, ANTIPARALLEL_MODEL)}


@dataclass(frozen=True)
class CorrelationEstimate:
    value: float
    std_error: float
    n: int

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("std_error must be non-negative")

    def to_dict(self) -> dict:
        return {"value": self.value, "std_error": self.std_error, "n": self.n}


def _chunks(n: int, chunk: int = CHUNK):
    for i, start in enumerate(range(0, n, chunk)):
        yield i, min(chunk, n - start)


def _check_n(n: int):
    if n < 100:
        raise ValueError(f"need n >= 100 samples, got {n}")


def hv_correlation(model: HiddenVariableModel, a, b, n: int, rng: RngStream) -> CorrelationEstimate:
    """Monte Carlo mean of A(a, lambda) B(b, lambda); chunk i draws from child stream i."""
    _check_n(n)
    a, b = _unit(a, "a"), _unit(b, "b")
    s = s2 = 0
    for i, m in _chunks(n):
        lam = model.lambda_sampler(rng.spawn(i), m)
        ab = model.response_A(a, lam).astype(np.int64) * model.response_B(b, lam)
        s += int(ab.sum())
        s2 += int((ab * ab).sum())
    mean = s / n
    var = max(s2 / n - mean * mean, 0.0)
    return CorrelationEstimate(mean, math.sqrt(var / n), n)


def projection_correlation(a, b, n: int, rng: RngStream) -> CorrelationEstimate:
    """Correlation of continuous projections (a.lambda)(-b.lambda), lambda uniform on the sphere.

    Normalized by sqrt(<(a.lambda)^2><(b.lambda)^2>) so parallel axes give -1;
    the standard error comes from the delta method on the ratio.
    """
    _check_n(n)
    a, b = _unit(a, "a"), _unit(b, "b")
    sums = np.zeros(3)
    cross = np.zeros((3, 3))
    for i, m in _chunks(n):
        lam = sphere_sampler(rng.spawn(i), m)
        pa, pb = lam @ a, lam @ b
        z = np.stack([-pa * pb, pa * pa, pb * pb])
        sums += z.sum(axis=1)
        cross += z @ z.T
    mu = sums / n
    cov = (cross / n - np.outer(mu, mu)) / n
    denom = math.sqrt(mu[1] * mu[2])
    value = mu[0] / denom
    grad = np.array([1.0 / denom, -0.5 * value / mu[1], -0.5 * value / mu[2]])
    se = math.sqrt(max(float(grad @ cov @ grad), 0.0))
    return CorrelationEstimate(float(value), se, n)


class MonteCarloCorrelation:
    """P(x, y) estimated from one shared lambda sample.

    Responses are cached per axis so every pair in a scan reuses the same
    draws; the Bell combination then holds sample by sample for a local model.
    """

    def __init__(self, model: HiddenVariableModel, n: int, rng: RngStream):
        _check_n(n)
        self.model, self.n = model, n
        self.lam = np.concatenate([model.lambda_sampler(rng.spawn(i), m) for i, m in _chunks(n)])
        self._A: dict = {}
        self._B: dict = {}

    def _resp(self, cache, f, axis):
        key = tuple(np.round(np.asarray(axis, dtype=float), 15))
        if key not in cache:
            cache[key] = f(np.asarray(axis, dtype=float), self.lam)
        return cache[key]

    def products(self, a, b) -> np.ndarray:
        A = self._resp(self._A, self.model.response_A, a)
        B = self._resp(self._B, self.model.response_B, b)
        return A.astype(np.int64) * B

    def estimate(self, a, b) -> CorrelationEstimate:
        ab = self.products(a, b)
        mean = float(ab.mean())
        return CorrelationEstimate(mean, math.sqrt(max(1.0 - mean * mean, 0.0) / self.n), self.n)

    def __call__(self, a, b) -> float:
        return self.estimate(a, b).value

    def std_error(self, a, b) -> float:
        return self.estimate(a, b).std_error


@dataclass(frozen=True)
class ScanRow:
    theta_ab: float
    theta_ac: float
    theta_bc: float
    lhs: float
    rhs: float
    satisfied: bool
    sigma: float = 0.0

    @property
    def margin(self) -> float:
        """rhs - lhs; positive means violation."""
        return self.rhs - self.lhs


@dataclass(frozen=True)
class ScanResult:
    rows: list
    worst: ScanRow

    @property
    def n_violations(self) -> int:
        return sum(not r.satisfied for r in self.rows)


def violation_scan(P: Callable, resolution: float, n_sigma: float = 3.0, atol: float = TIE_ATOL) -> ScanResult:
    """Coplanar triples with a along z and b, c at multiples of ``resolution`` in [0, pi].

    If ``P`` exposes ``std_error(x, y)`` a row counts as satisfied when
    ``lhs + n_sigma * sigma >= rhs`` with the three errors combined in quadrature.
    """
    steps = math.pi / resolution
    m = int(round(steps))
    if m < 1 or abs(steps - m) > 1e-9 * max(1.0, steps):
        raise ValueError("resolution must divide pi")
    thetas = [i * math.pi / m for i in range(m + 1)]
    axes = [coplanar_axis(t) for t in thetas]
    a = axes[0]
    err = getattr(P, "std_error", None)
    P_ab = [float(P(a, x)) for x in axes]
    E_ab = [float(err(a, x)) if err else 0.0 for x in axes]
    rows = []
    for i, b in enumerate(axes):
        for j, c in enumerate(axes):
            lhs = 1.0 + float(P(b, c))
            rhs = abs(P_ab[i] - P_ab[j])
            sig = math.sqrt(E_ab[i] ** 2 + E_ab[j] ** 2 + (float(err(b, c)) ** 2 if err else 0.0))
            ok = lhs + n_sigma * sig + atol >= rhs
            rows.append(ScanRow(thetas[i], thetas[j], abs(thetas[j] - thetas[i]), lhs, rhs, bool(ok), sig))
    worst = max(rows, key=lambda r: r.margin)
    return ScanResult(rows, worst)
