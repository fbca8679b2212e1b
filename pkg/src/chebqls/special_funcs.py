"""Chebyshev expansions of monomials, exp, a scaled logarithm and erf(kappa x).

Also builds sign and rectangle approximants from the erf series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import erf, erfc

from .cheb_core import ChebSeries, chebfit, next_pow2, series_eval, sup_grid

MAX_SIGN_DEGREE = 200_001
_RESCALE = 1e250


@dataclass(frozen=True)
class BesselScaled:
    order: int
    argument: float
    value: float  # e^{-x} I_n(x)


def bessel_i_scaled_seq(nmax: int, x: float) -> np.ndarray:
    """e^{-x} I_k(x) for k = 0..nmax by Miller's backward recurrence.

    Runs I_{k-1} = I_{k+1} + (2k/x) I_k downward from an index well past
    both nmax and the decay onset near sqrt(x), rescaling on overflow, and
    normalises with e^x = I_0 + 2 sum_{k>=1} I_k.
    """
    if nmax < 0:
        raise ValueError("order must be >= 0")
    if x < 0:
        raise ValueError("argument must be >= 0")
    out = np.zeros(nmax + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    start = nmax + int(9.0 * math.sqrt(x)) + 30
    nxt, cur = 0.0, 1e-300  # I_{start+1}, I_start up to scale
    total = 0.0
    two_over_x = 2.0 / x
    for k in range(start, 0, -1):
        if k <= nmax:
            out[k] = cur
        total += 2.0 * cur
        nxt, cur = cur, nxt + k * two_over_x * cur
        if cur > _RESCALE:
            cur /= _RESCALE
            nxt /= _RESCALE
            total /= _RESCALE
            out[k:] /= _RESCALE
    out[0] = cur
    total += cur
    return out / total


def bessel_i_scaled(n: int, x: float) -> BesselScaled:
    return BesselScaled(n, float(x), float(bessel_i_scaled_seq(n, x)[n]))


# ---------------------------------------------------------------------------
# monomials, exp, log


def _monomial_full(n: int) -> np.ndarray:
    """x^n = 2^{1-n} sum'_{j = n, n-2, ...} C(n, (n-j)/2) T_j, with the T_0 term halved."""
    if n < 0:
        raise ValueError("n must be >= 0")
    full = np.zeros(n + 1)
    if n == 0:
        full[0] = 1.0
        return full
    denom = 2 ** (n - 1)
    for j in range(n % 2, n + 1, 2):
        num = math.comb(n, (n - j) // 2)
        full[j] = num / denom if j else num / (2 * denom)
    return full


def monomial_cheb(n: int) -> ChebSeries:
    full = _monomial_full(n)
    parity = "odd" if n % 2 else "even"
    return ChebSeries(full[n % 2 :: 2], parity)


def _taylor_compose(weights: np.ndarray) -> ChebSeries:
    """sum_n weights[n] x^n re-expanded in the Chebyshev basis."""
    full = np.zeros(weights.size)
    for n, w in enumerate(weights):
        if w != 0.0:
            full[: n + 1] += w * _monomial_full(n)
    return ChebSeries(full, "none")


def exp_cheb(kappa: float, degree: int) -> ChebSeries:
    """Degree-``degree`` Taylor truncation of e^{kappa (x - 1)} in the Chebyshev basis."""
    if kappa < 0 or degree < 0:
        raise ValueError("need kappa >= 0 and degree >= 0")
    n = np.arange(degree + 1)
    if kappa == 0:
        w = (n == 0).astype(float)
    else:
        w = np.exp(n * math.log(kappa) - kappa - np.array([math.lgamma(k + 1) for k in n]))
    return _taylor_compose(w)


def slog_ratio(kappa: float) -> float:
    return (kappa - 1.0) / (kappa + 1.0)


def slog_exact(kappa: float, x):
    return np.log(1.0 / kappa + 0.5 * (np.asarray(x) + 1.0) * (1.0 - 1.0 / kappa))


def slog_cheb(kappa: float, degree: int) -> ChebSeries:
    """Taylor truncation of log(1/kappa + (x+1)/2 (1 - 1/kappa)).

    The function equals log((kappa+1)/(2 kappa)) + log(1 + r x) with
    r = (kappa-1)/(kappa+1), whose Taylor weights are (-1)^{n+1} r^n / n.
    """
    if kappa < 1 or degree < 0:
        raise ValueError("need kappa >= 1 and degree >= 0")
    r = slog_ratio(kappa)
    w = np.zeros(degree + 1)
    w[0] = math.log((kappa + 1.0) / (2.0 * kappa))
    n = np.arange(1, degree + 1)
    w[1:] = np.where(n % 2 == 1, 1.0, -1.0) * r**n / n
    return _taylor_compose(w)


def slog_norm_bound(kappa: float, degree: int) -> float:
    """|log((kappa+1)/(2 kappa))| + sum_{n<=degree} r^n / n, the triangle-inequality bound."""
    r = slog_ratio(kappa)
    n = np.arange(1, degree + 1)
    return abs(math.log((kappa + 1.0) / (2.0 * kappa))) + float(np.sum(r**n / n))


# ---------------------------------------------------------------------------
# erf


def erf_coeffs(kappa: float, nmax: int) -> np.ndarray:
    """Coefficients of T_{2n+1} in erf(kappa x), n = 0..nmax.

    c_n = (2 kappa / sqrt(pi)) (-1)^n (e^{-x} I_n(x) + e^{-x} I_{n+1}(x)) / (2n+1), x = kappa^2 / 2.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    ive = bessel_i_scaled_seq(nmax + 1, 0.5 * kappa * kappa)
    n = np.arange(nmax + 1)
    sign = np.where(n % 2 == 0, 1.0, -1.0)
    return 2.0 * kappa / math.sqrt(math.pi) * sign * (ive[:-1] + ive[1:]) / (2 * n + 1)


def erf_cheb(kappa: float, N: int) -> ChebSeries:
    if N < 0:
        raise ValueError("N must be >= 0")
    return ChebSeries(erf_coeffs(kappa, N), "odd")


def erf_coeff_bound(kappa: float, n) -> np.ndarray:
    """Per-coefficient bound (4/pi) / (2n+1) * (kappa^2 / (kappa^2 + n + 1/2))^{n + 1/2}."""
    n = np.asarray(n, dtype=float)
    k2 = kappa * kappa
    return 4.0 / math.pi / (2 * n + 1) * np.exp((n + 0.5) * np.log(k2 / (k2 + n + 0.5)))


def _tail_extent(kappa: float, N: int) -> int:
    # beyond ~kappa^2 the coefficients shrink at least geometrically (ratio 1/2)
    return max(2 * N + 10, math.ceil(2 * kappa * kappa) + 60)


def erf_tail_norm(kappa: float, N: int) -> float:
    """sum_{n>N} |c_n|, summed until the terms are far below double precision."""
    c = erf_coeffs(kappa, _tail_extent(kappa, N))
    return float(np.abs(c[N + 1 :]).sum())


@dataclass(frozen=True)
class ErfNormReport:
    norm: float
    head_bound: float
    tail_bound: Optional[float]  # only when N >= kappa^2
    full_estimate: float  # norm through ceil(kappa^2) plus 2^{2 - ceil(kappa^2)}
    full_bound: float  # 4 + 2 log kappa


def erf_coeff_norm(kappa: float, N: int) -> ErfNormReport:
    """Head norm of the erf series with its analytic head and tail bounds."""
    if N < 1:
        raise ValueError("N must be >= 1")
    c = erf_coeffs(kappa, max(N, math.ceil(kappa * kappa)))
    norm = float(np.abs(c[: N + 1]).sum())
    head = (6.0 + 2.0 * math.log(N)) / math.pi
    tail = 2.0 ** (2 - N) if N >= kappa * kappa else None
    nk = math.ceil(kappa * kappa)
    full = float(np.abs(c[: nk + 1]).sum()) + 2.0 ** (2 - nk)
    full_bound = 4.0 + 2.0 * math.log(kappa) if kappa >= 1 else 4.0
    if norm > head * (1 + 1e-12):
        raise AssertionError(f"erf head norm {norm} exceeds (6 + 2 log N)/pi = {head}")
    if full > full_bound:
        raise AssertionError(f"erf norm estimate {full} exceeds 4 + 2 log kappa = {full_bound}")
    return ErfNormReport(norm, head, tail, full, full_bound)


def erf_degree(kappa: float, epsilon: float, check: bool = True) -> int:
    """Truncation index N (polynomial degree 2N+1) with dropped tail <= epsilon.

    For epsilon <= 2^{2 - kappa^2}: N = ceil(log2(4/epsilon)). Otherwise
    N = ceil(alpha0 kappa) - 1 with alpha0 = ceil(sqrt(2 log(4 kappa/(pi eps')))),
    eps' = epsilon - 2^{2 - kappa^2}; when alpha0 > kappa the tail regime
    max(ceil(kappa^2), ceil(log2(4/epsilon))) is used instead.
    """
    if epsilon <= 0 or kappa < 1:
        raise ValueError("need epsilon > 0 and kappa >= 1")
    k2 = kappa * kappa
    tail_regime = max(math.ceil(k2), math.ceil(math.log2(4.0 / epsilon)))
    floor_eps = 2.0 ** (2.0 - k2)
    eps_prime = epsilon - floor_eps
    if eps_prime <= 0:
        n = math.ceil(math.log2(4.0 / epsilon))
    else:
        arg = 4.0 * kappa / (math.pi * eps_prime)
        alpha0 = max(1, math.ceil(math.sqrt(2.0 * math.log(arg)))) if arg > 1 else 1
        n = tail_regime if alpha0 > kappa else max(0, math.ceil(alpha0 * kappa) - 1)
    if check:
        dropped = erf_tail_norm(kappa, n)
        if dropped > epsilon:
            raise AssertionError(f"erf tail {dropped:.3e} beyond N={n} exceeds epsilon {epsilon:.3e}")
    return n


# ---------------------------------------------------------------------------
# discontinuous targets


def _sign_kappa(delta: float, epsilon: float) -> float:
    """Smallest kappa (bisection) with erfc(kappa delta) <= epsilon / 2."""
    target = epsilon / 2.0
    lo, hi = 0.0, 1.0 / delta
    while erfc(hi * delta) > target:
        hi *= 2.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if erfc(mid * delta) <= target:
            hi = mid
        else:
            lo = mid
    return max(hi, 1.0)


def sign_rect_approx(delta: float, epsilon: float, shape: str = "sign") -> ChebSeries:
    """Chebyshev series within epsilon of sign(x) or the rectangle Pi(x) away from jumps.

    sign: erf(kappa x) truncated at erf_degree(kappa, epsilon/2).
    rect: (erf(kappa(x + 1/2)) - erf(kappa(x - 1/2))) / 2, interpolated and
    trimmed to a coefficient tail below epsilon/4.
    """
    if not 0 < delta < 0.5 or epsilon <= 0:
        raise ValueError("need 0 < delta < 1/2 and epsilon > 0")
    kappa = _sign_kappa(delta, epsilon)
    budget = epsilon / (2.0 if shape == "sign" else 4.0)
    n = erf_degree(kappa, budget, check=False)
    if 2 * n + 1 > MAX_SIGN_DEGREE:
        raise ValueError(f"degree {2 * n + 1} exceeds the cap {MAX_SIGN_DEGREE} for delta={delta}, eps={epsilon}")
    erf_degree(kappa, budget)
    if shape == "sign":
        return erf_cheb(kappa, n)
    if shape != "rect":
        raise ValueError(f"unknown shape {shape!r}")
    m = next_pow2(4 * n + 64)
    s = chebfit(lambda x: 0.5 * (erf(kappa * (x + 0.5)) - erf(kappa * (x - 0.5))), m, "none")
    tail = np.cumsum(np.abs(s.coeffs)[::-1])[::-1]
    keep = int(np.argmax(tail <= epsilon / 4.0)) if np.any(tail <= epsilon / 4.0) else s.coeffs.size
    return s.truncated(max(keep, 1))


def sign_target(x) -> np.ndarray:
    return np.sign(x)


def rect_target(x) -> np.ndarray:
    return (np.abs(np.asarray(x)) < 0.5).astype(float)


def grid_error(s: ChebSeries, func, grid=None) -> float:
    g = sup_grid(s.degree) if grid is None else np.asarray(grid, dtype=float)
    return float(np.max(np.abs(series_eval(s, g) - func(g))))
