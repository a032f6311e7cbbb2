"""Analytic oracles and estimators for the OIM scaling results.

Includes the LIF-metric cdf, the small-argument power-law sandwich on it,
the DoF upper bound, the P_OIM estimator and log-log slope fitting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import DomainError

_EPS = 1e-15
_MAX_ITER = 10_000


def _gamma_series(a: float, x: float) -> float:
    # P(a, x) = x^a e^-x / Gamma(a+1) * sum_n x^n / ((a+1)...(a+n))
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cont_frac(a: float, x: float) -> float:
    # Q(a, x) via the modified Lentz continued fraction
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for n in range(1, _MAX_ITER):
        an = -n * (n - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def regularized_lower_gamma(a: float, x: float) -> float:
    """P(a, x) = gamma(a, x) / Gamma(a) for a > 0, x >= 0."""
    if not a > 0:
        raise DomainError(f"shape must be positive, got {a}")
    if x < 0:
        raise DomainError(f"argument must be nonnegative, got {x}")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_cont_frac(a, x)


def lower_gamma(a: float, x: float) -> float:
    """Unregularized lower incomplete gamma function gamma(a, x)."""
    if x < a + 1.0:
        # direct series avoids the cancellation in Gamma(a) * P for small x
        return 0.0 if x == 0 else _gamma_series(a, x) * math.gamma(a)
    return regularized_lower_gamma(a, x) * math.gamma(a)


def lif_cdf(shape: float, l: float) -> float:
    """cdf of the scheduling metric: P(shape, l / 2) (chi-square, 2*shape dof)."""
    if l < 0:
        raise DomainError(f"l must be nonnegative, got {l}")
    return regularized_lower_gamma(shape, l / 2.0)


def metric_shape(K: int, S: int) -> int:
    """Gamma shape (K - 1) S of the scheduling metric."""
    return (K - 1) * S


@dataclass(frozen=True)
class BoundConstants:
    """C1 l^a <= F_L(l) <= C2 l^a for 0 <= l < 2."""

    C1: float
    C2: float
    shape: int


def lemma1_constants(K: int, S: int) -> BoundConstants:
    if K < 2 or S < 1:
        raise DomainError(f"need K >= 2 and S >= 1, got K={K}, S={S}")
    a = metric_shape(K, S)
    base = 2.0 ** (-a) / (a * math.gamma(a))
    return BoundConstants(math.exp(-1.0) * base, 2.0 * base, a)


@dataclass(frozen=True)
class SandwichReport:
    holds: bool
    points: int
    # smallest (middle - lower) and (upper - middle) over the grid
    min_lower_margin: float
    min_upper_margin: float


def _sandwich(values: Iterable[tuple[float, float, float]], slack: float) -> SandwichReport:
    lo_m = up_m = math.inf
    holds = True
    n = 0
    for lo, mid, up in values:
        n += 1
        lo_m = min(lo_m, mid - lo)
        up_m = min(up_m, up - mid)
        if mid < lo - slack or mid > up + slack:
            holds = False
    return SandwichReport(holds, n, lo_m, up_m)


def check_lemma1(K: int, S: int, grid: Iterable[float], slack: float = 1e-12) -> SandwichReport:
    """Check C1 l^a <= F_L(l) <= C2 l^a at every grid point in [0, 2)."""
    grid = [float(l) for l in grid]
    if any(l < 0 or l >= 2 for l in grid):
        raise DomainError("power-law grid must lie in [0, 2)")
    c = lemma1_constants(K, S)
    a = c.shape
    return _sandwich(((c.C1 * l**a, lif_cdf(a, l), c.C2 * l**a) for l in grid), slack)


def check_gamma_inequalities(z: float, grid: Iterable[float], slack: float = 1e-12) -> SandwichReport:
    """Check x^z e^-1 / z <= gamma(z, x) <= 2 x^z / z for x in [0, 1)."""
    if not z > 0:
        raise DomainError(f"z must be positive, got {z}")
    grid = [float(x) for x in grid]
    if any(x < 0 or x >= 1 for x in grid):
        raise DomainError("gamma-inequality grid must lie in [0, 1)")
    return _sandwich(
        ((x**z * math.exp(-1.0) / z, lower_gamma(z, x), 2.0 * x**z / z) for x in grid), slack
    )


def dof_upper_bound(K: int, N: int, M: int) -> float:
    """Total-DoF upper bound K N M / (N + 1) of the IMAC model."""
    if min(K, N, M) < 1:
        raise DomainError(f"need K, N, M >= 1, got ({K}, {N}, {M})")
    return K * N * M / (N + 1)


def genie_upper_bound(K: int, M: int) -> int:
    """DoF bound K M with all inter-cell interference removed."""
    return K * M


def estimate_p_oim(lif_sums, snr: float, epsilon: float = 1.0) -> float:
    """Fraction of trials where every cell's received LIF * snr is <= epsilon.

    ``lif_sums`` has one row per trial and one column per cell.
    """
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    arr = np.asarray(lif_sums, dtype=float)
    if arr.size == 0:
        return float("nan")
    arr = arr.reshape(arr.shape[0], -1)
    return float(np.mean(np.all(arr * snr <= epsilon, axis=1)))


def fit_loglog_slope(points) -> float:
    """Least-squares slope of log(value) against log(N)."""
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise DomainError("need at least 3 (N, value) points")
    if np.any(pts <= 0):
        raise DomainError("log-log fit needs positive N and values")
    x, y = np.log(pts[:, 0]), np.log(pts[:, 1])
    x = x - x.mean()
    if not np.any(x):
        raise DomainError("log-log fit needs at least two distinct N")
    return float(np.dot(x, y - y.mean()) / np.dot(x, x))


def ecdf_sup_distance(samples, cdf: Callable[[float], float]) -> float:
    """Kolmogorov sup-distance between the empirical cdf of ``samples`` and ``cdf``."""
    xs = np.sort(np.asarray(samples, dtype=float).ravel())
    n = xs.size
    if n == 0:
        raise DomainError("no samples")
    F = np.array([cdf(x) for x in xs])
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))
