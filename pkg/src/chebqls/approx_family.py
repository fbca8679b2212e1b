"""Polynomial approximations of 1/x on D_kappa = [-1, -1/kappa] U [1/kappa, 1].

Three families, all odd of degree 2t - 1 and stored as odd Chebyshev series:

* gradient descent ``p_t(x) = (1 - (1 - x^2)^t) / x``,
* its truncated Chebyshev expansion (the CKS polynomial),
* Chebyshev iteration ``q_t(x) = (1 - T_t(s(x^2)) / T_t(s(0))) / x`` with
  ``s(y) = (1 + 1/kappa^2 - 2y) / (1 - 1/kappa^2)``, which is minimax optimal
  for the residual ``max |x p(x) - 1|`` over D_kappa.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np
from numba import njit
from scipy.optimize import linprog

from .cheb_core import (
    LOG_OVERFLOW_THRESHOLD,
    ChebNodes,
    ChebSeries,
    cheb_eval_halving,
    cheb_eval_log,
    interpolate,
    next_pow2,
    series_eval,
    sup_grid,
)


# magnitudes below this are flushed to zero so the deep, negligible
# coefficients never enter the (very slow) subnormal range
_FLUSH = 1e-280


class Family(str, enum.Enum):
    GRADIENT_DESCENT = "gd"
    CKS_TRUNCATED = "cks"
    CHEBYSHEV_ITERATION = "chebiter"


@dataclass(frozen=True)
class InverseApproxSpec:
    family: Family
    kappa: float
    t: int
    epsilon: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not self.kappa > 1:
            raise ValueError("kappa must exceed 1")
        if self.t < 1:
            raise ValueError("t must be >= 1")
        if self.family is Family.CKS_TRUNCATED and self.epsilon is None:
            raise ValueError("the truncated CKS family needs epsilon")

    @property
    def degree(self) -> int:
        return 2 * self.t - 1

    def build(self) -> ChebSeries:
        if self.family is Family.GRADIENT_DESCENT:
            return gd_poly(self.t)
        if self.family is Family.CKS_TRUNCATED:
            return cks_truncate(gd_poly(self.t), self.t, self.epsilon)
        return chebiter_coeffs(self.t, self.kappa)


@dataclass(frozen=True)
class ErrorReport:
    residual_notion2: float  # max over D_kappa of |x p(x) - 1|
    error_notion1: float  # max over D_kappa of |p(x) - 1/x|
    supnorm_full: float  # max over [-1, 1] of |p(x)|
    coeff_norm: float


# ---------------------------------------------------------------------------
# shared scalars


def s_map(y, kappa: float):
    """Affine map sending [1/kappa^2, 1] onto [1, -1]; ``y`` is x^2."""
    k2 = kappa * kappa
    return (1.0 + 1.0 / k2 - 2.0 * np.asarray(y, dtype=float)) / (1.0 - 1.0 / k2)


def s0(kappa: float) -> float:
    """s(0) = (kappa^2 + 1) / (kappa^2 - 1) > 1."""
    k2 = kappa * kappa
    return (k2 + 1.0) / (k2 - 1.0)


def log_T_s0(t: int, kappa: float) -> float:
    """log T_t(s(0)); the closed-form residual of q_t is exp(-log_T_s0)."""
    return float(cheb_eval_log(t, s0(kappa)))


def chebiter_residual_bound(t: int, kappa: float) -> float:
    """max over D_kappa of |x q_t(x) - 1| = 1 / T_t(s(0))."""
    return math.exp(-log_T_s0(t, kappa))


def domain_grid(degree: int, kappa: float, npts: Optional[int] = None) -> np.ndarray:
    """Measurement grid on D_kappa: Chebyshev points of [1/kappa, 1] and their mirror."""
    pos = sup_grid(degree, 1.0 / kappa, 1.0, npts)
    return np.concatenate([pos, -pos])


# ---------------------------------------------------------------------------
# gradient descent and CKS


def central_binomial_ratio(n: int) -> float:
    """C(2n, n) / 4^n, exact rounding for small n, asymptotic series otherwise."""
    if n < 64:
        return math.comb(2 * n, n) / 4**n
    log_r = -0.5 * math.log(math.pi * n) - 1 / (8 * n) + 1 / (192 * n**3) - 1 / (640 * n**5) + 17 / (14336 * n**7)
    return math.exp(log_r)


def binomial_tails(t: int) -> np.ndarray:
    """tails[j] = sum_{i=j+1}^{t} C(2t, t+i) / 4^t for j = 0..t-1.

    Terms r_i = C(2t, t+i) / 4^t follow from r_0 by the ratio
    r_i / r_{i-1} = (t - i + 1) / (t + i); deep terms underflow to zero,
    which is harmless because the tail is summed from the small end.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    r0 = central_binomial_ratio(t)
    i = np.arange(1, t + 1, dtype=float)
    r = r0 * np.cumprod((t - i + 1.0) / (t + i))
    return np.cumsum(r[::-1])[::-1]


def gd_poly(t: int) -> ChebSeries:
    """Exact odd Chebyshev expansion of p_t(x) = (1 - (1 - x^2)^t) / x."""
    tails = binomial_tails(t)
    signs = np.where(np.arange(t) % 2 == 0, 1.0, -1.0)
    return ChebSeries(4.0 * signs * tails, "odd")


def gd_eval(t: int, x):
    """p_t(x) evaluated directly (p_t(0) = 0 limit handled via x -> 0 series)."""
    xa = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        y = -np.expm1(t * np.log1p(-xa * xa)) / xa
    y = np.where(xa == 0.0, 0.0, y)
    return float(y) if np.ndim(x) == 0 else y


def cks_truncation_index(t: int, epsilon: float) -> int:
    """Highest kept coefficient index ceil(sqrt(t log(4t/eps))), at least 0."""
    return math.ceil(math.sqrt(t * max(0.0, math.log(4.0 * t / epsilon))))


def cks_truncate(s: ChebSeries, t: int, epsilon: float) -> ChebSeries:
    """Zero all coefficients above the CKS truncation index.

    The dropped coefficients of p_t have 1-norm at most ``epsilon``; this is
    checked on the actual tail.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if s.parity != "odd":
        raise ValueError("expected the odd series of p_t")
    j_max = cks_truncation_index(t, epsilon)
    if j_max + 1 >= len(s.coeffs):
        return s
    dropped = float(np.abs(s.coeffs[j_max + 1 :]).sum())
    if dropped > epsilon:
        raise AssertionError(f"dropped tail {dropped:.3e} exceeds epsilon {epsilon:.3e}")
    return s.truncated(j_max + 1)


def dropped_tail(s: ChebSeries, keep: int) -> float:
    return float(np.abs(s.coeffs[keep:]).sum())


def cks_parameters(kappa: float, epsilon: float, convention: str = "bound") -> tuple[int, int]:
    """(t, highest kept index j) of the CKS polynomial for target error epsilon.

    ``"bound"`` takes t = ceil(kappa^2 log(kappa^2/eps)) and truncates at
    ceil(sqrt(t log(4t/eps))). ``"table"`` is the split-error variant
    t = ceil(kappa^2 log(2 kappa/eps)), j = ceil(sqrt(t log(8t/eps))) that
    reproduces the reference degree table.
    """
    k2 = kappa * kappa
    if convention == "bound":
        t = max(1, math.ceil(k2 * math.log(k2 / epsilon)))
        return t, cks_truncation_index(t, epsilon)
    if convention == "table":
        t = max(1, math.ceil(k2 * math.log(2.0 * kappa / epsilon)))
        return t, cks_truncation_index(t, epsilon / 2.0)
    raise ValueError(f"unknown convention {convention!r}")


def cks_poly(kappa: float, epsilon: float, convention: str = "bound") -> ChebSeries:
    t, j = cks_parameters(kappa, epsilon, convention)
    return gd_poly(t).truncated(j + 1)


def cks_for_degree(kappa: float, degree: int, convention: str = "table") -> tuple[ChebSeries, int, float]:
    """The CKS instance whose parameter rule lands on the given odd degree.

    Bisects (in log epsilon) for the smallest epsilon whose truncation index
    still fits, returning (series, t, epsilon).
    """
    if degree < 1 or degree % 2 == 0:
        raise ValueError("degree must be odd and positive")
    j_target = (degree - 1) // 2
    if cks_parameters(kappa, 1.0 - 1e-12, convention)[1] > j_target:
        raise ValueError(f"degree {degree} is below every CKS instance for kappa={kappa}")
    lo, hi = math.log(1e-300), math.log(1.0 - 1e-12)  # hi fits, lo does not
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cks_parameters(kappa, math.exp(mid), convention)[1] <= j_target:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-12:
            break
    eps = math.exp(hi)
    t, j = cks_parameters(kappa, eps, convention)
    series = gd_poly(t).truncated(min(j, j_target) + 1)
    return series, t, eps


def best_truncated_gd(
    kappa: float, degrees, t_candidates: Optional[np.ndarray] = None
) -> tuple[np.ndarray, np.ndarray]:
    """For each odd degree, the smallest grid residual of a truncated p_t.

    Scans t over a geometric grid (default: 200 values up to 40 kappa^2) and,
    for every t, all truncation lengths at once through cumulative partial
    sums. Returns (residual_notion2 per degree, chosen t per degree).
    """
    degrees = np.asarray(degrees, dtype=int)
    if np.any(degrees < 1) or np.any(degrees % 2 == 0):
        raise ValueError("degrees must be odd and positive")
    keep = (degrees + 1) // 2
    n_max = int(keep.max())
    if t_candidates is None:
        t_candidates = np.unique(np.geomspace(1, 40 * kappa * kappa, 200).astype(int))
    g = sup_grid(2 * n_max - 1, 1.0 / kappa, 1.0)
    basis = np.cos(np.outer(np.arccos(g), 2 * np.arange(n_max) + 1))
    best = np.full(keep.size, np.inf)
    best_t = np.zeros(keep.size, dtype=int)
    for t in t_candidates:
        c = gd_poly(int(t)).coeffs[:n_max]
        partial = np.cumsum(basis[:, : c.size] * c, axis=1)  # column j: first j+1 terms
        res = np.max(np.abs(g[:, None] * partial - 1.0), axis=0)
        err = res[np.minimum(keep, c.size) - 1]
        better = err < best
        best[better] = err[better]
        best_t[better] = t
    return best, best_t


# ---------------------------------------------------------------------------
# Chebyshev iteration


def chebyshev_ratios(t_max: int, gamma: float) -> np.ndarray:
    """rho[k] = T_k(gamma) / T_{k+1}(gamma) for k = 0..t_max, without overflow."""
    rho = np.empty(t_max + 1)
    rho[0] = 1.0 / gamma
    for k in range(1, t_max + 1):
        rho[k] = 1.0 / (2.0 * gamma - rho[k - 1])
    return rho


def qt_eval(t: int, kappa: float, x):
    """q_t(x) = (1 - T_t(s(x^2)) / T_t(s(0))) / x, with q_t(0) = 0."""
    if t < 1 or not kappa > 1:
        raise ValueError("need t >= 1 and kappa > 1")
    xa = np.asarray(x, dtype=float)
    ratio = _residual_closed_form(t, kappa, xa)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = (1.0 - ratio) / xa
    q = np.where(xa == 0.0, 0.0, q)
    return float(q) if np.ndim(x) == 0 else q


def _residual_closed_form(t: int, kappa: float, xa: np.ndarray) -> np.ndarray:
    """T_t(s(x^2)) / T_t(s(0)), log domain wherever T_t would overflow."""
    s = s_map(xa * xa, kappa)
    log_t0 = log_T_s0(t, kappa)
    out = np.empty_like(s)
    big = s > 1.0
    if log_t0 <= LOG_OVERFLOW_THRESHOLD:
        out[...] = cheb_eval_halving(t, s) / math.exp(log_t0)
        return out
    out[~big] = cheb_eval_halving(t, s[~big]) * math.exp(-log_t0)
    if np.any(big):
        out[big] = np.exp(cheb_eval_log(t, s[big]) - log_t0)
    return out


def chebiter_residual(t: int, kappa: float, x):
    """Residual 1 - x q_t(x) via the normalised three-term recurrence.

    r_0 = 1, r_1 = s/gamma, r_{k+1} = 2 s rho_k r_k - rho_{k-1} rho_k r_{k-1}
    where s = s(x^2), gamma = s(0), rho_k = T_k(gamma)/T_{k+1}(gamma). No
    cancellation occurs, so tiny residuals keep full relative accuracy.
    """
    xa = np.asarray(x, dtype=float)
    s = s_map(xa * xa, kappa)
    gamma = s0(kappa)
    rho = chebyshev_ratios(t, gamma)
    prev, cur = np.ones_like(s), s / gamma
    for k in range(1, t):
        prev, cur = cur, 2.0 * s * rho[k] * cur - rho[k - 1] * rho[k] * prev
    if t == 0:
        cur = prev
    return float(cur) if np.ndim(x) == 0 else cur


def iter_chebiter_coeffs(kappa: float, t_max: int) -> Iterator[np.ndarray]:
    """Yield the odd Chebyshev coefficients of q_1, q_2, ..., q_{t_max}.

    Runs the polynomial recurrence of Chebyshev iteration in coefficient
    space (applied to A^2, i.e. with condition number kappa^2):

        q_{k+1} = 2 rho_k s(x^2) q_k - rho_{k-1} rho_k q_{k-1} + 4K/(K-1) rho_k x

    with K = kappa^2, s(x^2) = (K + 1 - 2K x^2)/(K - 1), q_0 = 0 and
    q_1 = 2K/(K+1) x. Each step costs O(k).
    """
    rho = chebyshev_ratios(t_max, s0(kappa))
    alpha, beta, shift, q1 = _recurrence_constants(kappa)
    prev = np.zeros(t_max + 1)
    cur = np.zeros(t_max + 1)
    cur[0] = q1
    yield cur[:1].copy()
    for k in range(1, t_max):
        n = k  # q_k occupies cur[:k]
        # x^2 T_{2i+1} = (T_{2i+3} + 2 T_{2i+1} + T_{|2i-1|}) / 4
        xsq = np.zeros(n + 1)
        xsq[: n] += 0.5 * cur[:n]
        xsq[1 : n + 1] += 0.25 * cur[:n]
        xsq[: n - 1] += 0.25 * cur[1:n]
        xsq[0] += 0.25 * cur[0]
        nxt = 2.0 * rho[k] * (alpha * cur[: n + 1] - beta * xsq) - rho[k - 1] * rho[k] * prev[: n + 1]
        nxt[0] += shift * rho[k]
        nxt[np.abs(nxt) < _FLUSH] = 0.0
        prev[: n + 1] = cur[: n + 1]
        cur[: n + 1] = nxt
        yield nxt.copy()


@njit(cache=True)
def _coeff_recurrence(t, alpha, beta, shift, rho, q1):
    prev = np.zeros(t + 1)
    cur = np.zeros(t + 1)
    nxt = np.zeros(t + 1)
    cur[0] = q1
    for k in range(1, t):
        a = 2.0 * rho[k]
        b = rho[k - 1] * rho[k]
        for i in range(k + 1):
            ci = cur[i] if i < k else 0.0
            x2 = 0.5 * ci
            if i >= 1:
                x2 += 0.25 * cur[i - 1]
            if i + 1 < k:
                x2 += 0.25 * cur[i + 1]
            if i == 0:
                x2 += 0.25 * cur[0]
            v = a * (alpha * ci - beta * x2) - b * prev[i]
            nxt[i] = v if abs(v) > _FLUSH else 0.0
        nxt[0] += shift * rho[k]
        for i in range(k + 1):
            prev[i] = cur[i]
            cur[i] = nxt[i]
    return cur[:t].copy()


def _recurrence_constants(kappa: float) -> tuple[float, float, float, float]:
    k2 = kappa * kappa
    return (k2 + 1.0) / (k2 - 1.0), 2.0 * k2 / (k2 - 1.0), 4.0 * k2 / (k2 - 1.0), 2.0 * k2 / (k2 + 1.0)


def chebiter_coeffs_recurrence(t: int, kappa: float, rho: Optional[np.ndarray] = None) -> np.ndarray:
    """O(t^2) scalar coefficient recurrence (compiled); see :func:`iter_chebiter_coeffs`."""
    if rho is None:
        rho = chebyshev_ratios(t, s0(kappa))
    alpha, beta, shift, q1 = _recurrence_constants(kappa)
    return _coeff_recurrence(t, alpha, beta, shift, rho, q1)


def chebiter_coeffs(t: int, kappa: float, method: str = "fast") -> ChebSeries:
    """Odd Chebyshev coefficients c_{t,i} of q_t, i = 0..t-1.

    ``"fast"``: evaluate q_t at the Chebyshev nodes (O(log t) each via degree
    halving, log domain where needed) and interpolate with the radix-2 DCT;
    O(t log t) overall. ``"recurrence"``: the O(t^2) coefficient recurrence.
    """
    if t < 1 or not kappa > 1:
        raise ValueError("need t >= 1 and kappa > 1")
    if method == "recurrence":
        return ChebSeries(chebiter_coeffs_recurrence(t, kappa), "odd")
    if method != "fast":
        raise ValueError(f"unknown method {method!r}")
    m = next_pow2(2 * t)
    x = ChebNodes(m).nodes
    values = qt_eval(t, kappa, x)
    s = interpolate(values, "odd", method="fast")
    return s.truncated(t)


# ---------------------------------------------------------------------------
# error measurement


def residual_error(
    s: ChebSeries, kappa: float, grid: Optional[np.ndarray] = None, npts: Optional[int] = None
) -> ErrorReport:
    """Both error notions over a D_kappa grid plus the sup-norm on [-1, 1]."""
    if not kappa > 1:
        raise ValueError("kappa must exceed 1")
    g = domain_grid(s.degree, kappa, npts) if grid is None else np.asarray(grid, dtype=float)
    p = series_eval(s, g)
    full = sup_grid(s.degree, npts=npts)
    return ErrorReport(
        residual_notion2=float(np.max(np.abs(g * p - 1.0))),
        error_notion1=float(np.max(np.abs(p - 1.0 / g))),
        supnorm_full=float(np.max(np.abs(series_eval(s, full)))),
        coeff_norm=s.coeff_norm(),
    )


def chebiter_measured_residual(t: int, kappa: float, notion: int = 2, npts: Optional[int] = None) -> float:
    """Grid maximum of the q_t error measured through :func:`chebiter_residual`."""
    g = sup_grid(2 * t - 1, 1.0 / kappa, 1.0, npts)
    r = np.abs(chebiter_residual(t, kappa, g))
    if notion == 1:
        r = r / g
    return float(np.max(r))


SWEEP_HEADER = ("family", "kappa", "t", "degree", "coeff_norm", "residual_notion2", "error_notion1", "supnorm_full")


def chebiter_report(t: int, kappa: float, npts: Optional[int] = None) -> ErrorReport:
    """ErrorReport for q_t with both D_kappa notions taken from the stable residual recurrence."""
    c = chebiter_coeffs(t, kappa)
    full = sup_grid(c.degree, npts=npts)
    return ErrorReport(
        residual_notion2=chebiter_measured_residual(t, kappa, 2, npts),
        error_notion1=chebiter_measured_residual(t, kappa, 1, npts),
        supnorm_full=float(np.max(np.abs(series_eval(c, full)))),
        coeff_norm=c.coeff_norm(),
    )


# ---------------------------------------------------------------------------
# degrees


def _formula_t(family: Family, kappa: float, epsilon: float) -> float:
    if family is Family.CHEBYSHEV_ITERATION:
        return 0.5 * kappa * math.log(2.0 * kappa * kappa / epsilon)
    return kappa * kappa * math.log(kappa * kappa / epsilon)


def min_degree(
    family,
    kappa: float,
    epsilon: float,
    mode: str = "formula",
    convention: str = "bound",
    notion: int = 2,
) -> int:
    """Smallest odd degree reaching error ``epsilon`` on D_kappa.

    ``mode="formula"`` applies the sufficient-degree bounds (natural log):
    t >= kappa^2 log(kappa^2/eps) for gradient descent and
    t >= kappa/2 log(2 kappa^2/eps) for Chebyshev iteration. Under
    ``convention="bound"`` the degree is 2 ceil(t) - 1; ``"table"`` reports
    2 ceil(t) + 1 for Chebyshev iteration and the split-error CKS rule of
    :func:`cks_parameters`, which together reproduce the reference table.

    ``mode="measured"`` binary-searches the actual grid error in the chosen
    notion (1: |p - 1/x|, 2: |x p - 1|); ties go to the smaller degree.
    """
    family = Family(family)
    if not kappa > 1 or epsilon <= 0:
        raise ValueError("need kappa > 1 and epsilon > 0")
    if mode == "formula":
        if family is Family.CKS_TRUNCATED:
            _, j = cks_parameters(kappa, epsilon, convention)
            return 2 * j + 1
        t = max(1, math.ceil(_formula_t(family, kappa, epsilon)))
        if convention == "table" and family is Family.CHEBYSHEV_ITERATION:
            return 2 * t + 1
        return 2 * t - 1
    if mode != "measured":
        raise ValueError(f"unknown mode {mode!r}")

    if family is Family.CHEBYSHEV_ITERATION:
        def err(t):
            return chebiter_measured_residual(t, kappa, notion)
        hi = max(1, math.ceil(_formula_t(family, kappa, epsilon))) + 1
    elif family is Family.GRADIENT_DESCENT:
        def err(t):
            g = sup_grid(2 * t - 1, 1.0 / kappa, 1.0)
            r = np.abs((1.0 - g * g) ** t)
            return float(np.max(r / g if notion == 1 else r))
        hi = max(1, math.ceil(_formula_t(family, kappa, epsilon))) + 1
    else:
        t_cks, j_hi = cks_parameters(kappa, epsilon, convention)
        full = gd_poly(t_cks)
        j_hi = min(j_hi, t_cks - 1)

        def err(j):
            s = full.truncated(j)
            rep = residual_error(s, kappa)
            return rep.error_notion1 if notion == 1 else rep.residual_notion2

        # search over the number of kept coefficients
        hi = j_hi + 1
        while err(hi) > epsilon and hi < t_cks:
            hi = min(t_cks, 2 * hi)
    while err(hi) > epsilon:
        hi *= 2
    lo = 1
    while lo < hi:
        mid = (lo + hi) // 2
        if err(mid) <= epsilon:
            hi = mid
        else:
            lo = mid + 1
    return 2 * lo - 1


# ---------------------------------------------------------------------------
# norm bounds and optimality


def supnorm_bound(t: int, kappa: float, coeffs: Optional[ChebSeries] = None) -> tuple[float, float]:
    """(sum |c_{t,i}|, 2 (1 + 1/T_t(s(0))) t); asserts the first is below the second."""
    c = chebiter_coeffs(t, kappa) if coeffs is None else coeffs
    norm = c.coeff_norm()
    bound = 2.0 * (1.0 + math.exp(-log_T_s0(t, kappa))) * t
    if norm > bound:
        raise AssertionError(f"coefficient norm {norm} exceeds bound {bound} (t={t}, kappa={kappa})")
    return norm, bound


def alternation_points(t: int, kappa: float) -> np.ndarray:
    """Points of [1/kappa, 1] where T_t(s(x^2)) = (-1)^j, j = 0..t (increasing x)."""
    k2 = kappa * kappa
    s = np.cos(np.arange(t + 1) * np.pi / t)
    y = (1.0 + 1.0 / k2 - (1.0 - 1.0 / k2) * s) / 2.0
    return np.sqrt(y)


def lp_grid(t: int, kappa: float, npts: int = 512) -> np.ndarray:
    """Chebyshev-distributed points of [1/kappa, 1] that include the t+1 alternation points."""
    alt = alternation_points(t, kappa)
    k = np.arange(npts - alt.size)
    lo, hi = 1.0 / kappa, 1.0
    cheb = 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos((k + 0.5) * np.pi / k.size)
    return np.sort(np.concatenate([alt, cheb]))


@dataclass(frozen=True)
class OptimalityReport:
    t: int
    kappa: float
    closed_form_residual: float
    pointwise_error: float
    alternation_count: int
    alternates: bool
    lp_residual: float
    lp_ratio: float  # lp_residual / closed_form_residual

    @property
    def passed(self) -> bool:
        return (
            self.pointwise_error <= 1e-10
            and self.alternates
            and self.alternation_count >= self.t + 1
            and self.lp_ratio >= 1.0 - 1e-6
        )


def minimax_lp(t: int, kappa: float, grid: np.ndarray) -> float:
    """Least grid residual max |x P(x) - 1| over odd P of degree 2t - 1.

    P is parameterised as q_t + D / T_t(s(0)) with D odd, so the LP works with
    O(1) quantities: minimise e subject to |T_t(s(x^2)) - x D(x)| <= e. The
    returned value is e* / T_t(s(0)).
    """
    g = np.asarray(grid, dtype=float)
    base = np.cos(t * np.arccos(np.clip(s_map(g * g, kappa), -1.0, 1.0)))
    basis = np.cos(np.outer(np.arccos(g), 2 * np.arange(t) + 1))  # T_{2i+1}(x_k)
    xb = g[:, None] * basis
    ones = np.ones((g.size, 1))
    # variables: D coefficients (t), e
    a_ub = np.vstack([np.hstack([-xb, -ones]), np.hstack([xb, -ones])])
    b_ub = np.concatenate([-base, base])
    cost = np.zeros(t + 1)
    cost[-1] = 1.0
    res = linprog(
        cost,
        A_ub=a_ub,
        b_ub=b_ub,
        bounds=[(None, None)] * (t + 1),
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if not res.success:
        raise RuntimeError(f"minimax LP failed: {res.message}")
    return float(res.x[-1]) * math.exp(-log_T_s0(t, kappa))


def optimality_check(t: int, kappa: float, npts: int = 512) -> OptimalityReport:
    """Certify that q_t minimises max_{D_kappa} |x P(x) - 1| among odd degree-(2t-1) P.

    Checks (a) the series residual matches the closed form pointwise, (b) the
    residual equioscillates at t+1 points with magnitude 1/T_t(s(0)), and
    (c) a grid minimax LP finds nothing better. Since the LP value on any
    finite subset lower-bounds the continuous minimax, (c) is a certificate.
    """
    if t < 1 or t > 32:
        raise ValueError("optimality_check supports 1 <= t <= 32")
    bound = chebiter_residual_bound(t, kappa)
    c = chebiter_coeffs(t, kappa)
    g = sup_grid(2 * t - 1)
    pointwise = float(np.max(np.abs((1.0 - g * series_eval(c, g)) - _residual_closed_form(t, kappa, g))))

    alt = alternation_points(t, kappa)
    r_alt = chebiter_residual(t, kappa, alt)
    dense = sup_grid(2 * t - 1, 1.0 / kappa, 1.0)
    peak = float(np.max(np.abs(chebiter_residual(t, kappa, dense))))
    attained = np.abs(np.abs(r_alt) - bound) <= 1e-9 * bound
    signs = np.sign(r_alt)
    alternates = bool(np.all(signs[1:] == -signs[:-1])) and peak <= bound * (1 + 1e-9)

    lp = minimax_lp(t, kappa, lp_grid(t, kappa, npts))
    return OptimalityReport(
        t=t,
        kappa=kappa,
        closed_form_residual=bound,
        pointwise_error=pointwise,
        alternation_count=int(attained.sum()),
        alternates=alternates,
        lp_residual=lp,
        lp_ratio=lp / bound,
    )
