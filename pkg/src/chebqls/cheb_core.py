"""Chebyshev polynomial primitives.

Evaluation of single Chebyshev polynomials T_t (three-term recurrence,
closed form outside [-1, 1], log domain, and degree halving), Clenshaw
evaluation of parity-tagged series, Chebyshev nodes and interpolation via
a self-contained radix-2 FFT.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]

PARITIES = ("none", "odd", "even")

# log T_t(x) above which T_t(x) is evaluated in log space only
LOG_OVERFLOW_THRESHOLD = 500.0


@dataclass(frozen=True)
class ChebSeries:
    """Coefficients of a polynomial in the Chebyshev basis.

    ``coeffs[i]`` multiplies T_i when ``parity == "none"``, T_{2i+1} when
    ``parity == "odd"`` and T_{2i} when ``parity == "even"``.
    """

    coeffs: np.ndarray
    parity: str = "none"

    def __post_init__(self):
        if self.parity not in PARITIES:
            raise ValueError(f"unknown parity {self.parity!r}")
        c = np.array(self.coeffs, dtype=float).ravel()
        if c.size == 0:
            raise ValueError("a ChebSeries needs at least one coefficient")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def basis_degree(self, i: int) -> int:
        if self.parity == "odd":
            return 2 * i + 1
        if self.parity == "even":
            return 2 * i
        return i

    @property
    def degree(self) -> int:
        return self.basis_degree(len(self.coeffs) - 1)

    @property
    def basis_degrees(self) -> np.ndarray:
        return np.array([self.basis_degree(i) for i in range(len(self.coeffs))])

    def coeff_norm(self) -> float:
        """1-norm of the coefficient vector; an upper bound on sup |p| over [-1, 1]."""
        return float(np.abs(self.coeffs).sum())

    def to_full(self) -> np.ndarray:
        """Dense coefficient vector indexed by basis degree."""
        full = np.zeros(self.degree + 1)
        full[self.basis_degrees] = self.coeffs
        return full

    def __call__(self, x):
        return series_eval(self, x)

    def __add__(self, other: "ChebSeries") -> "ChebSeries":
        if self.parity == other.parity:
            n = max(len(self.coeffs), len(other.coeffs))
            c = np.zeros(n)
            c[: len(self.coeffs)] += self.coeffs
            c[: len(other.coeffs)] += other.coeffs
            return ChebSeries(c, self.parity)
        a, b = self.to_full(), other.to_full()
        c = np.zeros(max(a.size, b.size))
        c[: a.size] += a
        c[: b.size] += b
        return ChebSeries(c, "none")

    def __mul__(self, scalar: float) -> "ChebSeries":
        return ChebSeries(self.coeffs * float(scalar), self.parity)

    __rmul__ = __mul__

    def truncated(self, keep: int) -> "ChebSeries":
        """Series with only the first ``keep`` stored coefficients."""
        return ChebSeries(self.coeffs[: max(1, keep)], self.parity)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "basis_degree", "coefficient"])
        for i, c in enumerate(self.coeffs):
            writer.writerow([i, self.basis_degree(i), f"{c:.17g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, parity: str | None = None) -> "ChebSeries":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise ValueError("empty coefficient CSV")
        degrees = [int(r["basis_degree"]) for r in rows]
        if parity is None:
            if all(d == 2 * i + 1 for i, d in enumerate(degrees)):
                parity = "odd"
            elif all(d == 2 * i for i, d in enumerate(degrees)) and len(degrees) > 1:
                parity = "even"
            else:
                parity = "none"
        return cls(np.array([float(r["coefficient"]) for r in rows]), parity)


@dataclass(frozen=True)
class ChebNodes:
    """Roots of T_m: x_k = cos((k - 1/2) pi / m) for k = 1..m (decreasing)."""

    order: int
    nodes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("node order must be >= 1")
        k = np.arange(1, self.order + 1)
        object.__setattr__(self, "nodes", np.cos((k - 0.5) * np.pi / self.order))


def _as_float_array(x):
    return np.asarray(x, dtype=float)


def _unwrap(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def cheb_eval(t: int, x: ArrayLike) -> ArrayLike:
    """T_t(x).

    Uses the three-term recurrence on [-1, 1] and the closed form
    ((x - r)^t + (x + r)^t) / 2 with r = sqrt(x^2 - 1) outside it. Raises
    ``OverflowError`` when the result is too large for a float; use
    :func:`cheb_eval_log` there.
    """
    if t < 0:
        raise ValueError("degree must be non-negative")
    xa = _as_float_array(x)
    out = np.empty_like(xa)
    inside = np.abs(xa) <= 1.0
    if np.any(inside):
        xi = xa[inside]
        prev, cur = np.ones_like(xi), xi.copy()
        if t == 0:
            cur = prev
        for _ in range(t - 1):
            prev, cur = cur, 2.0 * xi * cur - prev
        out[inside] = cur
    outside = ~inside
    if np.any(outside):
        xo = np.abs(xa[outside])
        growth = t * np.arccosh(xo)
        if np.any(growth > LOG_OVERFLOW_THRESHOLD):
            raise OverflowError("T_t(x) overflows; use cheb_eval_log")
        r = np.sqrt((xo - 1.0) * (xo + 1.0))
        val = 0.5 * ((xo - r) ** t + (xo + r) ** t)
        sign = np.where(xa[outside] < 0, (-1.0) ** t, 1.0)
        out[outside] = sign * val
    return _unwrap(out, x)


def cheb_eval_log(t: int, x: ArrayLike) -> ArrayLike:
    """Natural log of T_t(x) for x > 1, safe for astronomically large values."""
    if t < 0:
        raise ValueError("degree must be non-negative")
    xa = _as_float_array(x)
    if np.any(xa <= 1.0):
        raise ValueError("cheb_eval_log needs x > 1")
    a = np.arccosh(xa)
    # T_t(x) = cosh(t a) = e^{ta} (1 + e^{-2ta}) / 2
    out = t * a - math.log(2.0) + np.log1p(np.exp(-2.0 * t * a))
    return _unwrap(out, x)


def cheb_eval_halving(t: int, x: ArrayLike) -> ArrayLike:
    """T_t(x) in O(log t) operations.

    Walks the binary digits of ``t`` from the top, maintaining the pair
    (T_k, T_{k+1}) with T_{2k} = 2 T_k^2 - 1 and T_{2k+1} = 2 T_k T_{k+1} - x.
    """
    if t < 0:
        raise ValueError("degree must be non-negative")
    xa = _as_float_array(x)
    if t == 0:
        return _unwrap(np.ones_like(xa), x)
    lo, hi = np.ones_like(xa), xa.copy()
    for bit in bin(t)[2:]:
        mixed = 2.0 * lo * hi - xa
        if bit == "1":
            lo, hi = mixed, 2.0 * hi * hi - 1.0
        else:
            lo, hi = 2.0 * lo * lo - 1.0, mixed
    return _unwrap(lo, x)


def series_eval(s: ChebSeries, x: ArrayLike) -> ArrayLike:
    """Evaluate a Chebyshev series by backward Clenshaw recurrence.

    Odd series are evaluated as x * V(2x^2 - 1) where V is expanded in the
    third-kind basis V_i(y) with T_{2i+1}(x) = x V_i(2x^2 - 1); even series
    as a first-kind series in 2x^2 - 1. Accuracy degrades for |x| > 1.
    """
    xa = _as_float_array(x)
    c = s.coeffs
    if s.parity == "none":
        y = xa
    else:
        y = 2.0 * xa * xa - 1.0
    b1 = np.zeros_like(y)
    b2 = np.zeros_like(y)
    two_y = 2.0 * y
    for ck in c[:0:-1]:
        b1, b2 = ck + two_y * b1 - b2, b1
    if s.parity == "odd":
        # V_0 = 1, V_1 = 2y - 1
        out = xa * (c[0] + two_y * b1 - b2 - b1)
    else:
        out = c[0] + y * b1 - b2
    return _unwrap(out, x)


def next_pow2(m: int) -> int:
    return 1 << max(0, (int(m) - 1).bit_length())


@lru_cache(maxsize=32)
def _fft_plan(n: int):
    levels = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for _ in range(levels):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    twiddles = []
    size = 1
    while size < n:
        twiddles.append(np.exp(-1j * np.pi * np.arange(size) / size))
        size *= 2
    return rev, twiddles


def fft_radix2(a: np.ndarray) -> np.ndarray:
    """Iterative decimation-in-time radix-2 FFT (length must be a power of two)."""
    a = np.asarray(a, dtype=complex)
    n = a.size
    if n & (n - 1):
        raise ValueError("fft_radix2 needs a power-of-two length")
    rev, twiddles = _fft_plan(n)
    x = a[rev]
    size = 1
    for tw in twiddles:
        # n // (2 size) independent butterflies of span `size`
        x = x.reshape(n // (2 * size), 2, size)
        odd = x[:, 1, :] * tw
        x = np.concatenate([x[:, 0, :] + odd, x[:, 0, :] - odd], axis=1)
        size *= 2
    return x.reshape(n)


@lru_cache(maxsize=32)
def _dct_twiddle(m: int) -> np.ndarray:
    return np.exp(-0.5j * np.pi * np.arange(m) / m)


def dct2(values: np.ndarray) -> np.ndarray:
    """X_j = sum_k f_k cos(pi j (k + 1/2) / m).

    Uses one length-m radix-2 FFT of the even/odd reordered input
    (equivalent to the length-2m mirrored transform, at half the cost).
    """
    f = np.asarray(values, dtype=float)
    m = f.size
    if m == 1:
        return f.copy()
    v = np.concatenate([f[::2], f[1::2][::-1]])
    return (_dct_twiddle(m) * fft_radix2(v)).real


def _finish_interpolation(full: np.ndarray, parity: str, scale: float) -> ChebSeries:
    if parity == "none":
        return ChebSeries(full, "none")
    keep = 1 if parity == "odd" else 0
    drop = full[1 - keep :: 2]
    tol = 1e-10 * max(1.0, scale)
    if drop.size and np.max(np.abs(drop)) > tol:
        raise ValueError(
            f"values are not {parity}: opposite-parity coefficient "
            f"{np.max(np.abs(drop)):.3e} exceeds {tol:.1e}"
        )
    return ChebSeries(full[keep::2], parity)


def interpolate(values, parity_hint: str = "none", method: str = "auto") -> ChebSeries:
    """Chebyshev coefficients of the degree-(m-1) interpolant at ChebNodes(m).

    ``values[k-1]`` is the function value at x_k = cos((k - 1/2) pi / m).
    ``method`` is "reference" (O(m^2) discrete orthogonality sums), "fast"
    (radix-2 DCT, m must be a power of two) or "auto".
    """
    f = np.asarray(values, dtype=float).ravel()
    m = f.size
    if m < 1:
        raise ValueError("need at least one value")
    is_pow2 = (m & (m - 1)) == 0
    if method == "auto":
        method = "fast" if is_pow2 else "reference"
    if method == "fast":
        if not is_pow2:
            raise ValueError("fast interpolation needs a power-of-two node count")
        full = dct2(f)
    elif method == "reference":
        theta = (np.arange(1, m + 1) - 0.5) * np.pi / m
        full = np.cos(np.outer(np.arange(m), theta)) @ f
    else:
        raise ValueError(f"unknown method {method!r}")
    full = full * (2.0 / m)
    full[0] *= 0.5
    scale = float(np.max(np.abs(f))) if m else 1.0
    return _finish_interpolation(full, parity_hint, scale)


def chebfit(func: Callable[[np.ndarray], np.ndarray], m: int, parity: str = "none") -> ChebSeries:
    """Interpolate ``func`` at ChebNodes(m') with m' >= m the next power of two.

    The returned series keeps only basis degrees below ``m``.
    """
    mp = next_pow2(m)
    nodes = ChebNodes(mp).nodes
    s = interpolate(func(nodes), parity, method="fast")
    keep = {"none": m, "odd": m // 2, "even": (m + 1) // 2}[parity]
    return s.truncated(keep)


def sup_grid(degree: int, lo: float = -1.0, hi: float = 1.0, npts: int | None = None) -> np.ndarray:
    """Chebyshev-distributed measurement grid on [lo, hi] including both endpoints.

    Uses max(4 degree, 1024) interior points unless ``npts`` is given.
    """
    npts = max(4 * int(degree), 1024) if npts is None else int(npts)
    k = np.arange(npts)
    inner = np.cos((k + 0.5) * np.pi / npts)
    pts = 0.5 * (lo + hi) + 0.5 * (hi - lo) * inner
    return np.concatenate([[hi], pts, [lo]])


def sup_norm(s: ChebSeries, grid: Iterable[float] | None = None) -> float:
    """Measured max |p(x)| over the grid (default: :func:`sup_grid` on [-1, 1])."""
    g = sup_grid(s.degree) if grid is None else np.asarray(grid, dtype=float)
    return float(np.max(np.abs(series_eval(s, g))))
