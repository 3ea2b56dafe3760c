"""Markov chain of the alternating game on the 4^N history states.

Each round moves the chain from history h = (i1 i2 ... i_2N) to
h' = (i3 ... i_2N a b), where a is the leader's fresh choice (played with
probability p_h of C) and b the follower's reply (probability q_k of C,
with k the follower's conditioning index). The matrix is row-stochastic;
the stationary distribution is its left eigenvector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonUniqueStationaryError
from .strategy import Strategy, state_label

__all__ = [
    "TransitionMatrix",
    "build_matrix_direct",
    "build_matrix_recursive",
    "stationary",
    "perturb_strategies",
    "is_irreducible",
]

_NULL_SPACE_TOL = 1e-10


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic transition matrix over the 4^N history states."""

    memory: int
    entries: np.ndarray

    def state_labels(self) -> list:
        return [state_label(i, self.memory) for i in range(self.entries.shape[0])]


def _check_pair(p: Strategy, q: Strategy) -> int:
    if p.memory != q.memory:
        raise ValueError("leader and follower must share the same memory length")
    return p.memory


def build_matrix_direct(p: Strategy, q: Strategy) -> TransitionMatrix:
    """Shift-and-append construction, entry by entry.

    The row for history h holds the quadruple
    p_h q_kC, p_h (1-q_kC), (1-p_h) q_kD, (1-p_h)(1-q_kD)
    at the columns obtained by dropping h's oldest round and appending the
    fresh (a, b) pair; kA is the follower index for leader action A.
    """
    memory = _check_pair(p, q)
    n = 4**memory
    mask = n - 1
    m = np.zeros((n, n))
    for h in range(n):
        for a in (0, 1):
            p_factor = p.probs[h] if a == 0 else 1.0 - p.probs[h]
            k = ((h << 1) | a) & mask
            for b in (0, 1):
                q_factor = q.probs[k] if b == 0 else 1.0 - q.probs[k]
                col = ((h << 2) | (a << 1) | b) & mask
                m[h, col] += p_factor * q_factor
    return TransitionMatrix(memory=memory, entries=m)


# Entry pattern of the memory-1 matrix, row by row: each entry is
# (+-)p[p_idx] * (+-)q[q_idx] with the complement flags below.
_BASE_COL = np.array([[0, 1, 2, 3]] * 4)
_BASE_P_IDX = np.array([[0] * 4, [1] * 4, [2] * 4, [3] * 4])
_BASE_P_COMP = np.array([[False, False, True, True]] * 4)
_BASE_Q_IDX = np.array([[0, 0, 1, 1], [2, 2, 3, 3], [0, 0, 1, 1], [2, 2, 3, 3]])
_BASE_Q_COMP = np.array([[False, True, False, True]] * 4)


def _pattern(memory: int):
    """Symbolic entry pattern (col, p index, p flag, q index, q flag) built by
    the cut-into-quarters recursion.

    The memory-(m+1) matrix stacks sixteen slabs: the four quarters of the
    memory-m matrix, repeated once per prefix pair XY in {CC, CD, DC, DD}.
    Slab (XY, quarter j) lands in block column j; its p indices gain the
    prefix XY and its q indices gain (Y, first old symbol) at the front.
    """
    col, p_idx, p_comp, q_idx, q_comp = (
        _BASE_COL,
        _BASE_P_IDX,
        _BASE_P_COMP,
        _BASE_Q_IDX,
        _BASE_Q_COMP,
    )
    for m in range(1, memory):
        n_old = 4**m
        quarter = n_old // 4
        old_first_bit = p_idx >> (2 * m - 1)  # leading symbol of each old p word
        slab_of_row = np.arange(n_old) // quarter
        new_col = np.empty((4 * n_old, 4), dtype=int)
        new_p_idx = np.empty_like(new_col)
        new_q_idx = np.empty_like(new_col)
        for g in range(4):
            rows = slice(g * n_old, (g + 1) * n_old)
            new_col[rows] = slab_of_row[:, None] * n_old + col
            new_p_idx[rows] = g * n_old + p_idx
            g2 = g & 1
            new_q_idx[rows] = (g2 << (2 * m + 1)) | (old_first_bit << (2 * m)) | q_idx
        col, p_idx, q_idx = new_col, new_p_idx, new_q_idx
        p_comp = np.tile(p_comp, (4, 1))
        q_comp = np.tile(q_comp, (4, 1))
    return col, p_idx, p_comp, q_idx, q_comp


def build_matrix_recursive(p: Strategy, q: Strategy) -> TransitionMatrix:
    """Block-recursive construction; must agree with the direct one to 1e-15."""
    memory = _check_pair(p, q)
    if memory == 1:
        raise ValueError("recursion base is memory 1")
    col, p_idx, p_comp, q_idx, q_comp = _pattern(memory)
    p_factor = np.where(p_comp, 1.0 - p.probs[p_idx], p.probs[p_idx])
    q_factor = np.where(q_comp, 1.0 - q.probs[q_idx], q.probs[q_idx])
    n = 4**memory
    m = np.zeros((n, n))
    rows = np.repeat(np.arange(n), 4)
    m[rows, col.ravel()] = (p_factor * q_factor).ravel()
    return TransitionMatrix(memory=memory, entries=m)


def stationary(matrix: TransitionMatrix) -> np.ndarray:
    """Stationary distribution nu with nu^T M = nu^T and sum(nu) = 1.

    Solves the dense system with one equation replaced by the normalization.
    If that system is singular the null space of (M^T - I) is inspected: a
    numerically one-dimensional kernel still yields the unique distribution,
    anything wider raises NonUniqueStationaryError.
    """
    m = matrix.entries
    n = m.shape[0]
    a = m.T - np.eye(n)
    a[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    nu = None
    try:
        candidate = np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError:
        candidate = None
    if candidate is not None and _is_distribution(candidate, m):
        nu = candidate
    if nu is None:
        nu = _kernel_distribution(m)
    nu = nu.clip(min=0.0)
    return nu / nu.sum()


def _is_distribution(nu: np.ndarray, m: np.ndarray) -> bool:
    if not np.all(np.isfinite(nu)) or nu.min() < -1e-12:
        return False
    return np.abs(nu @ m - nu).max() < 1e-10


def _kernel_distribution(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    _, sing, vt = np.linalg.svd(m.T - np.eye(n))
    null_dim = int(np.sum(sing < _NULL_SPACE_TOL))
    if null_dim != 1:
        raise NonUniqueStationaryError("non-unique stationary distribution")
    nu = vt[-1]
    total = nu.sum()
    if abs(total) < 1e-12 or nu.min() * np.sign(total) < -1e-12 * abs(total):
        raise NonUniqueStationaryError("non-unique stationary distribution")
    nu = nu / total
    if not _is_distribution(nu, m):
        raise NonUniqueStationaryError("non-unique stationary distribution")
    return nu


def perturb_strategies(p: Strategy, q: Strategy, eps: float):
    """Mix both strategies with noise: v -> eps + (1 - 2 eps) v."""
    if not 0.0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    return (
        Strategy(eps + (1.0 - 2.0 * eps) * p.probs),
        Strategy(eps + (1.0 - 2.0 * eps) * q.probs),
    )


def is_irreducible(matrix: TransitionMatrix, tol: float = 0.0) -> bool:
    """Strong connectivity of the digraph of transitions above tol."""
    adj = matrix.entries > tol
    return _reaches_all(adj) and _reaches_all(adj.T)


def _reaches_all(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    frontier = [0]
    while frontier:
        nxt = adj[frontier].any(axis=0) & ~seen
        seen |= nxt
        frontier = list(np.flatnonzero(nxt))
    return bool(seen.all())
