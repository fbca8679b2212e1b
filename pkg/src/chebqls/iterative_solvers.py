"""Classical iterative solvers whose iterates are polynomials in A applied to b."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .approx_family import chebyshev_ratios
from .cheb_core import cheb_eval_log


@dataclass(frozen=True)
class DenseHermitian:
    """Dense Hermitian matrix whose nonzero eigenvalues are certified to lie in D_kappa."""

    entries: np.ndarray
    kappa: float

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("entries must be square")
        if not np.allclose(a, a.conj().T, rtol=0.0, atol=1e-12):
            raise ValueError("matrix is not Hermitian")
        if not self.kappa >= 1:
            raise ValueError("kappa must be >= 1")
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other):
        return self.entries @ other


@dataclass
class IterateTrace:
    iterates: list = field(default_factory=list)
    residual_norms: list = field(default_factory=list)
    diverged: bool = False

    @property
    def final(self) -> np.ndarray:
        return self.iterates[-1]

    def record(self, a: np.ndarray, b: np.ndarray, x: np.ndarray) -> None:
        self.iterates.append(x)
        self.residual_norms.append(float(np.linalg.norm(a @ x - b)))
        if self.residual_norms[-1] > 10.0 * max(self.residual_norms[0], np.finfo(float).tiny):
            self.diverged = True


def _matrix(a) -> np.ndarray:
    return a.entries if isinstance(a, DenseHermitian) else np.asarray(a)


# ---------------------------------------------------------------------------
# matrix generation and text I/O


def random_hermitian(
    n: int,
    kappa: float,
    seed: Optional[int] = None,
    positive: bool = False,
    real: bool = False,
    include_endpoints: bool = True,
) -> DenseHermitian:
    """Random Hermitian matrix with spectrum drawn from D_kappa (or [1/kappa, 1]).

    Eigenvalue magnitudes are uniform on [1/kappa, 1]; with
    ``include_endpoints`` the first two are pinned to 1/kappa and 1 so the
    condition number is attained.
    """
    rng = np.random.default_rng(seed)
    mags = rng.uniform(1.0 / kappa, 1.0, size=n)
    if include_endpoints and n >= 2:
        mags[0], mags[1] = 1.0 / kappa, 1.0
    elif include_endpoints:
        mags[0] = 1.0 / kappa
    signs = np.ones(n) if positive else rng.choice([-1.0, 1.0], size=n)
    eig = mags * signs
    if real:
        z = rng.standard_normal((n, n))
    else:
        z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    a = (q * eig) @ q.conj().T
    return DenseHermitian(0.5 * (a + a.conj().T), kappa)


def format_matrix(a) -> str:
    m = _matrix(a)
    lines = [str(m.shape[0])]
    for row in m:
        lines.append(" ".join(f"{z.real:.17g}{z.imag:+.17g}j" for z in np.asarray(row, dtype=complex)))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> np.ndarray:
    """Inverse of :func:`format_matrix`: ``n`` then n rows of ``re+imj`` tokens."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix text")
    n = int(lines[0])
    rows = [[complex(tok) for tok in ln.split()] for ln in lines[1:]]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"expected {n} rows of {n} entries")
    return np.array(rows, dtype=complex)


def read_matrix(path, kappa: float) -> DenseHermitian:
    return DenseHermitian(parse_matrix(Path(path).read_text()), kappa)


def write_matrix(path, a) -> None:
    Path(path).write_text(format_matrix(a))


# ---------------------------------------------------------------------------
# solvers


def gradient_descent(a, b, t: int, eta: float = 1.0) -> IterateTrace:
    """x_k = (I - eta A) x_{k-1} + eta b from x_1 = b.

    With eta = 1 the t-th iterate is p_t^+(A) b, p_t^+(l) = (1 - (1 - l)^t) / l.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    m = _matrix(a)
    b = np.asarray(b)
    trace = IterateTrace()
    x = b.astype(np.result_type(m, b, float))
    trace.record(m, b, x)
    for _ in range(t - 1):
        x = x - eta * (m @ x) + eta * b
        trace.record(m, b, x)
    return trace


def chebyshev_iteration(a, b, t: int, kappa: float) -> IterateTrace:
    """Chebyshev iteration for A with spectrum in [1/kappa, 1].

    With gamma = (kappa + 1)/(kappa - 1), rho_k = T_k(gamma)/T_{k+1}(gamma):

        x_{k+1} = 2 rho_k ((kappa + 1) I - 2 kappa A)/(kappa - 1) x_k
                  - rho_{k-1} rho_k x_{k-1} + 4 kappa/(kappa - 1) rho_k b

    started from x_0 = 0, x_1 = 2 kappa/(kappa + 1) b, so x_k = q_k^+(A) b
    for every k, where q_k^+(l) = (1 - T_k(s(l))/T_k(gamma))/l.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if not kappa > 1:
        raise ValueError("kappa must exceed 1")
    m = _matrix(a)
    b = np.asarray(b)
    gamma = (kappa + 1.0) / (kappa - 1.0)
    rho = chebyshev_ratios(t, gamma)
    scale = 1.0 / (kappa - 1.0)
    trace = IterateTrace()
    prev = np.zeros_like(b, dtype=np.result_type(m, b, float))
    x = (2.0 * kappa / (kappa + 1.0)) * b
    trace.record(m, b, x)
    for k in range(1, t):
        sx = scale * ((kappa + 1.0) * x - 2.0 * kappa * (m @ x))
        prev, x = x, 2.0 * rho[k] * sx - rho[k - 1] * rho[k] * prev + 4.0 * kappa * scale * rho[k] * b
        trace.record(m, b, x)
    return trace


def general_solve(a, b, t: int, kappa: float) -> np.ndarray:
    """q_t(A) b for Hermitian A with spectrum in D_kappa.

    Runs Chebyshev iteration on the positive definite A^2 (condition number
    kappa^2) with right-hand side A b, so the result is q_t^+(A^2) A b.
    """
    m = _matrix(a)
    b = np.asarray(b)
    return chebyshev_iteration(m @ m, m @ b, t, kappa * kappa).final


def steps_to_tolerance(kappa: float, epsilon: float, method: str) -> int:
    """Worst-case steps until max_l |l p(l) - 1| <= epsilon on [1/kappa, 1]."""
    if method == "gd":
        # (1 - 1/kappa)^t <= eps
        return math.ceil(math.log(epsilon) / math.log1p(-1.0 / kappa))
    if method == "chebyshev":
        gamma = (kappa + 1.0) / (kappa - 1.0)
        t = 1
        while float(cheb_eval_log(t, gamma)) < -math.log(epsilon):
            t += 1
        return t
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# negative results


def momentum_parameters(kappa: float) -> tuple[float, float]:
    """Step size and momentum of the heavy-ball method tuned for condition number kappa."""
    eta = 4.0 / (1.0 + math.sqrt(1.0 / kappa)) ** 2
    beta = (1.0 - 2.0 / (1.0 + math.sqrt(kappa))) ** 2
    return eta, beta


def momentum_matrix_norm(
    kappa: float,
    lambda_grid=None,
    eta: Optional[float] = None,
    beta: Optional[float] = None,
) -> float:
    """max over eigenvalues l of ||[[1 + beta - eta l, -beta], [1, 0]]||_2.

    The heavy-ball iteration matrix decouples into these 2x2 blocks along the
    eigenvectors of A. ``eta``/``beta`` override the tuned values.
    """
    if not kappa >= 1:
        raise ValueError("kappa must be >= 1")
    eta0, beta0 = momentum_parameters(kappa)
    eta = eta0 if eta is None else eta
    beta = beta0 if beta is None else beta
    lam = np.linspace(1.0 / kappa, 1.0, 257) if lambda_grid is None else np.asarray(lambda_grid, dtype=float)
    blocks = np.zeros((lam.size, 2, 2))
    blocks[:, 0, 0] = 1.0 + beta - eta * lam
    blocks[:, 0, 1] = -beta
    blocks[:, 1, 0] = 1.0
    return float(np.max(np.linalg.norm(blocks, ord=2, axis=(1, 2))))


def log_qtplus_at_minus_one(t: int, kappa: float) -> float:
    """log |q_t^+(-1)| = log(T_t(s(-1))/T_t(gamma) - 1), s the [1/kappa, 1] -> [1, -1] map."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if not kappa > 1:
        raise ValueError("kappa must exceed 1")
    s_minus = (3.0 * kappa + 1.0) / (kappa - 1.0)
    gamma = (kappa + 1.0) / (kappa - 1.0)
    lr = float(cheb_eval_log(t, s_minus) - cheb_eval_log(t, gamma))
    return lr + math.log(-math.expm1(-lr))


def qtplus_blowup(t: int, kappa: float) -> float:
    """|q_t^+(-1)|; asserts it is at least (3/2)^t / 2, compared in log domain."""
    log_val = log_qtplus_at_minus_one(t, kappa)
    floor = t * math.log(1.5) - math.log(2.0)
    if log_val < floor:
        raise AssertionError(f"|q_t^+(-1)| below (3/2)^t/2 at t={t}, kappa={kappa}")
    return math.exp(log_val) if log_val < 709.0 else math.inf
