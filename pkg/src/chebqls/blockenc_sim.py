"""Dense simulation of block-encodings, the Chebyshev QSVT circuit and the LCU circuit.

Register order is most-significant first: [counter] [dilation ancilla] [system].
The encoded block therefore sits in the top-left n x n corner of every unitary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .cheb_core import ChebSeries, cheb_eval

UNITARY_TOL = 1e-10
# full LCU unitaries above this dimension are not materialised
MAX_FULL_DIM = 4096


@dataclass(frozen=True)
class BlockEncoding:
    unitary: np.ndarray
    ancillas: int
    mu: float
    n: int
    queries: int = 1  # calls to U_A or its inverse

    def __post_init__(self):
        u = np.asarray(self.unitary, dtype=complex)
        if u.shape != (2**self.ancillas * self.n,) * 2:
            raise ValueError(f"unitary shape {u.shape} does not match 2^{self.ancillas} x {self.n}")
        object.__setattr__(self, "unitary", u)

    @property
    def top_left(self) -> np.ndarray:
        """The ancilla-zero block of the unitary, i.e. A / mu."""
        return self.unitary[: self.n, : self.n]

    @property
    def block(self) -> np.ndarray:
        """The encoded operator mu * top_left."""
        return self.mu * self.top_left

    def check(self, tol: float = UNITARY_TOL) -> None:
        u = self.unitary
        err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
        if err > tol:
            raise AssertionError(f"not unitary: deviation {err:.2e}")
        if np.linalg.norm(self.block, 2) > self.mu * (1 + tol):
            raise AssertionError("encoded block exceeds its subnormalization")


@dataclass(frozen=True)
class QlsOutput:
    state: np.ndarray  # full register state, ancillas most significant
    alpha: float  # norm of the flag-zero system branch
    x_tilde: np.ndarray  # normalised flag-zero system state
    residual: float
    query_count: int
    mu: float

    @property
    def flag_zero(self) -> np.ndarray:
        return self.alpha * self.x_tilde


def spectral_apply(a: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """f(A) through an eigendecomposition (oracle and input preparation only)."""
    w, v = np.linalg.eigh(a)
    return (v * f(w)) @ v.conj().T


def _matrix(a) -> np.ndarray:
    return np.asarray(getattr(a, "entries", a), dtype=complex)


def _assert_unitary(u: np.ndarray, what: str) -> None:
    err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if err > UNITARY_TOL:
        raise AssertionError(f"{what} is not unitary: deviation {err:.2e}")


def dilate(a) -> BlockEncoding:
    """One-ancilla unitary dilation [[A, S], [S, -A]] with S = sqrt(I - A^2)."""
    m = _matrix(a)
    if not np.allclose(m, m.conj().T, rtol=0.0, atol=1e-12):
        raise ValueError("dilation needs a Hermitian matrix")
    w, v = np.linalg.eigh(m)
    if np.max(np.abs(w), initial=0.0) > 1.0 + 1e-12:
        raise ValueError("spectral norm exceeds 1")
    root = (v * np.sqrt(np.clip(1.0 - w * w, 0.0, 1.0))) @ v.conj().T
    u = np.block([[m, root], [root, -m]])
    _assert_unitary(u, "dilation")
    return BlockEncoding(u, ancillas=1, mu=1.0, n=m.shape[0], queries=1)


def reflection(n: int, ancillas: int = 1) -> np.ndarray:
    """2 Pi - I for Pi the projector onto the ancilla-zero subspace."""
    d = np.full(2**ancillas * n, -1.0)
    d[:n] = 1.0
    return np.diag(d)


def _phase(n: int, ancillas: int, phi: float) -> np.ndarray:
    """exp(i phi (2 Pi - I)) as a diagonal vector."""
    d = np.full(2**ancillas * n, np.exp(-1j * phi))
    d[:n] = np.exp(1j * phi)
    return d


def _require_single_ancilla(be: BlockEncoding) -> None:
    if be.ancillas != 1:
        raise ValueError("expected a single-ancilla block-encoding")


def w_operator(be: BlockEncoding) -> np.ndarray:
    """W = (2 Pi - I) U^dagger (2 Pi - I) U; two queries."""
    _require_single_ancilla(be)
    r = np.diag(reflection(be.n))[:, None]
    u = be.unitary
    w = r * (u.conj().T @ (r * u))
    _assert_unitary(w, "W")
    return w


def chebyshev_block(be: BlockEncoding, t: int, verify: bool = True) -> BlockEncoding:
    """U W^k encodes T_{2k+1}(A) with exactly t = 2k + 1 queries."""
    if t < 1 or t % 2 == 0:
        raise ValueError("t must be a positive odd integer")
    _require_single_ancilla(be)
    k = (t - 1) // 2
    u = be.unitary @ np.linalg.matrix_power(w_operator(be), k)
    out = BlockEncoding(u, ancillas=1, mu=1.0, n=be.n, queries=t * be.queries)
    if verify:
        expected = spectral_apply(be.block, lambda x: cheb_eval(t, x))
        err = np.max(np.abs(out.block - expected))
        if err > 1e-9:
            raise AssertionError(f"U W^{k} block differs from T_{t}(A) by {err:.2e}")
    return out


def chebyshev_phases(t: int) -> np.ndarray:
    """Phases implementing T_t: phi_1 = (1 - t) pi / 2, the rest pi / 2."""
    if t < 1:
        raise ValueError("t must be >= 1")
    phases = np.full(t, np.pi / 2)
    phases[0] = (1 - t) * np.pi / 2
    return phases


def _phased_sequence(be: BlockEncoding, phases: Sequence[float]) -> np.ndarray:
    n, u = be.n, be.unitary
    ud = u.conj().T
    d = len(phases)
    if d % 2 == 1:
        out = _phase(n, 1, phases[0])[:, None] * u
        pairs = range(1, d, 2)
    else:
        out = np.eye(u.shape[0], dtype=complex)
        pairs = range(0, d, 2)
    for j in pairs:
        out = out @ (_phase(n, 1, phases[j])[:, None] * ud)
        out = out @ (_phase(n, 1, phases[j + 1])[:, None] * u)
    return out


def qsvt_sequence(be: BlockEncoding, phases: Sequence[float]) -> np.ndarray:
    """Block of the (Phi, -Phi) symmetrised phased alternating sequence.

    Odd length d: e^{i phi_1 R} U prod_j (e^{i phi_2j R} U^dagger e^{i phi_2j+1 R} U).
    Even length: prod_j (e^{i phi_2j-1 R} U^dagger e^{i phi_2j R} U), no leading U.
    Returns (block(U_Phi) + block(U_-Phi)) / 2, the real polynomial part.
    """
    _require_single_ancilla(be)
    phases = np.asarray(phases, dtype=float)
    if phases.size < 1:
        raise ValueError("need at least one phase")
    n = be.n
    plus = _phased_sequence(be, phases)[:n, :n]
    minus = _phased_sequence(be, -phases)[:n, :n]
    return 0.5 * (plus + minus)


def counter_qubits(t: int) -> int:
    return math.ceil(math.log2(t)) + 1 if t > 1 else 1


def _householder_with_first_column(v: np.ndarray) -> np.ndarray:
    """Real orthogonal matrix whose first column is the real unit vector v."""
    e0 = np.zeros_like(v)
    e0[0] = 1.0
    w = e0 - v
    nw = float(w @ w)
    if nw < 1e-30:
        return np.eye(v.size)
    return np.eye(v.size) - 2.0 * np.outer(w, w) / nw


def _coeff_vector(c) -> np.ndarray:
    if isinstance(c, ChebSeries):
        if c.parity != "odd":
            raise ValueError("LCU expects an odd Chebyshev series")
        return np.asarray(c.coeffs, dtype=float)
    return np.asarray(c, dtype=float)


@dataclass(frozen=True)
class _LcuParts:
    prep_left: np.ndarray
    prep_right: np.ndarray
    branches: list  # U W^i for each counter value
    norm1: float
    queries: int
    counter: int


def _lcu_parts(be: BlockEncoding, c) -> _LcuParts:
    _require_single_ancilla(be)
    coeffs = _coeff_vector(c)
    if coeffs.size == 0 or not np.any(coeffs):
        raise ValueError("zero coefficient vector")
    t = coeffs.size
    l = counter_qubits(t)
    size = 2**l
    norm1 = float(np.abs(coeffs).sum())
    padded = np.zeros(size)
    padded[:t] = coeffs
    v_right = np.sqrt(np.abs(padded) / norm1)
    v_left = np.sign(padded) * v_right  # sqrt(|c_i|) e^{i theta_i}, theta_i in {0, pi}
    # controlled W^{2^j} on counter bit j, composed per branch
    w = w_operator(be)
    powers = [w]
    for _ in range(1, l):
        powers.append(powers[-1] @ powers[-1])
    branches = []
    for i in range(size):
        op = be.unitary
        for j in range(l):
            if i >> j & 1:
                op = op @ powers[j]
        branches.append(op)
    active = np.nonzero(padded)[0]
    queries = int(max(2 * i + 1 for i in active)) * be.queries
    return _LcuParts(
        _householder_with_first_column(v_left),
        _householder_with_first_column(v_right),
        branches,
        norm1,
        queries,
        l,
    )


def lcu_apply(be: BlockEncoding, c) -> BlockEncoding:
    """||c||_1-block-encoding of sum_i c_i T_{2i+1}(A) via prepare/select/unprepare.

    SELECT = sum_i |i><i| (x) U W^i is assembled from controlled W^{2^j};
    negative coefficients carry their sign on the left preparation only.
    """
    parts = _lcu_parts(be, c)
    size = 2**parts.counter
    inner = be.unitary.shape[0]
    dim = size * inner
    if dim > MAX_FULL_DIM:
        raise ValueError(f"full LCU unitary of dimension {dim} exceeds {MAX_FULL_DIM}; use solve_qls")
    select = np.zeros((dim, dim), dtype=complex)
    for i, op in enumerate(parts.branches):
        select[i * inner : (i + 1) * inner, i * inner : (i + 1) * inner] = op
    eye = np.eye(inner)
    u = np.kron(parts.prep_left.T, eye) @ select @ np.kron(parts.prep_right, eye)
    _assert_unitary(u, "LCU circuit")
    return BlockEncoding(u, ancillas=parts.counter + 1, mu=parts.norm1, n=be.n, queries=parts.queries)


def solve_qls(be: BlockEncoding, b, t: int, kappa: float, coeffs: Optional[ChebSeries] = None) -> QlsOutput:
    """Run the q_t LCU circuit on |0...0>|b> and report the QLSP quantities.

    The flag-zero system branch equals q_t(A) b / ||c||_1. The state is
    propagated branch by branch, so no full circuit unitary is formed.
    """
    from .approx_family import chebiter_coeffs

    b = np.asarray(b, dtype=complex)
    if abs(np.linalg.norm(b) - 1.0) > 1e-10:
        raise ValueError("b must be a unit vector")
    c = chebiter_coeffs(t, kappa) if coeffs is None else coeffs
    parts = _lcu_parts(be, c)
    size = 2**parts.counter
    inner = be.unitary.shape[0]
    start = np.zeros(inner, dtype=complex)
    start[: be.n] = b
    selected = np.stack([parts.prep_right[i, 0] * (op @ start) for i, op in enumerate(parts.branches)])
    state = (parts.prep_left.T @ selected).reshape(size * inner)
    branch = state[: be.n]
    alpha = float(np.linalg.norm(branch))
    x_tilde = branch / alpha
    ax = be.block @ x_tilde
    residual = float(np.linalg.norm(ax / np.linalg.norm(ax) - b))
    return QlsOutput(state, alpha, x_tilde, residual, parts.queries, parts.norm1)
