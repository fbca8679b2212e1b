"""Integer gadgets tying matrix powers and inverses to counting problems.

Vertex layout of the graph for an n x n 0/1 matrix X (0-based):
0 is the source apex, 1..n the left set, n+1..2n the right set and 2n+1 the
sink apex. The apexes join every vertex of their side; left i joins
right j when X[i, j] = 1. Paths of length 3 from source to sink are
therefore in bijection with the ones of X.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

INT = np.int64


def _as_01(x) -> np.ndarray:
    m = np.asarray(x)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("X must be square")
    if not np.isin(m, (0, 1)).all():
        raise ValueError("X must be a 0/1 matrix")
    return m.astype(INT)


def gadget_adjacency(x, directed: bool = False) -> np.ndarray:
    """(2n+2)-vertex adjacency matrix; ``directed`` orients source -> left -> right -> sink."""
    xm = _as_01(x)
    n = xm.shape[0]
    a = np.zeros((2 * n + 2, 2 * n + 2), dtype=INT)
    a[0, 1 : n + 1] = 1
    a[1 : n + 1, n + 1 : 2 * n + 1] = xm
    a[n + 1 : 2 * n + 1, 2 * n + 1] = 1
    if not directed:
        a = a + a.T
    return a


@dataclass(frozen=True)
class GadgetA:
    matrix: np.ndarray
    path_count: int  # (A^3)[source, sink]


def build_gadget_A(x) -> GadgetA:
    """Undirected gadget A with the check (A^3)[0, 2n+1] = sum X asserted."""
    a = gadget_adjacency(x)
    cube = a @ a @ a
    count = int(cube[0, -1])
    if count != int(np.asarray(x).sum()):
        raise AssertionError("path count differs from the number of ones in X")
    return GadgetA(a, count)


def build_block_B(a) -> np.ndarray:
    """4m x 4m block upper-bidiagonal matrix with I on the diagonal and A above it."""
    am = np.asarray(a, dtype=INT)
    if am.ndim != 2 or am.shape[0] != am.shape[1]:
        raise ValueError("A must be square")
    m = am.shape[0]
    b = np.eye(4 * m, dtype=INT)
    for k in range(3):
        b[k * m : (k + 1) * m, (k + 1) * m : (k + 2) * m] = am
    return b


def block_B_inverse(a) -> np.ndarray:
    """Closed form: block (i, j) of B^{-1} is (-A)^{j-i} for j >= i."""
    am = np.asarray(a, dtype=INT)
    m = am.shape[0]
    powers = [np.eye(m, dtype=INT)]
    for _ in range(3):
        powers.append(-(powers[-1] @ am))
    inv = np.zeros((4 * m, 4 * m), dtype=INT)
    for i in range(4):
        for j in range(i, 4):
            inv[i * m : (i + 1) * m, j * m : (j + 1) * m] = powers[j - i]
    return inv


@dataclass(frozen=True)
class BlockBChecks:
    matrix: np.ndarray
    inverse: np.ndarray
    corner: int  # (B^{-1})[0, 4m-1]
    cube_corner: int  # (A^3)[0, m-1]


def verify_block_B(a) -> BlockBChecks:
    """Build B, check B @ inverse == I exactly and corner == -(A^3)[0, m-1]."""
    am = np.asarray(a, dtype=INT)
    b = build_block_B(am)
    inv = block_B_inverse(am)
    if not np.array_equal(b @ inv, np.eye(b.shape[0], dtype=INT)):
        raise AssertionError("closed-form inverse of B is wrong")
    corner = int(inv[0, -1])
    cube_corner = int((am @ am @ am)[0, -1])
    if corner != -cube_corner:
        raise AssertionError("corner of B^{-1} is not -(A^3)[0, m-1]")
    return BlockBChecks(b, inv, corner, cube_corner)


@dataclass(frozen=True)
class ColumnNorm:
    measured: int  # ||B^{-1} e_last||^2 computed from the exact inverse
    formula: int  # (sum X)^2 + sum_i (row sum i)^2 + n + 1


def last_column_norm(x) -> ColumnNorm:
    """Squared norm of the last column of B^{-1} for the directed gadget, two ways.

    Entries of that column are (-1)^k times the number of length-k paths into
    the sink, k = 0..3: one for k = 0, n for k = 1, the row sums of X for
    k = 2 and sum X for k = 3.
    """
    xm = _as_01(x)
    n = xm.shape[0]
    inv = block_B_inverse(gadget_adjacency(xm, directed=True))
    col = inv[:, -1]
    measured = int(col @ col)
    rows = xm.sum(axis=1)
    formula = int(xm.sum()) ** 2 + int(rows @ rows) + n + 1
    if measured != formula:
        raise AssertionError(f"last column norm {measured} differs from formula {formula}")
    return ColumnNorm(measured, formula)


def random_instance(n: int, rng: np.random.Generator, density: float = 0.5) -> np.ndarray:
    return (rng.random((n, n)) < density).astype(INT)
