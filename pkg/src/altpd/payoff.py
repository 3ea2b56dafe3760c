"""Payoff vectors over history states and the two payoff routes.

The expected per-round payoff of the leader is <nu, f> with nu the
stationary distribution; the same number falls out of a determinant ratio
that never forms nu explicitly. Both are exposed and must agree.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .chain import TransitionMatrix, build_matrix_direct, stationary
from .errors import SingularPayoffError
from .strategy import PayoffParams, Strategy, raw_from_donation

__all__ = [
    "build_payoff_vector",
    "payoff_by_stationary",
    "payoff_by_determinant",
    "reversal_identity_check",
    "check_well_defined",
]


def build_payoff_vector(params: PayoffParams, memory: int) -> np.ndarray:
    """Mean per-round payoff of the leader for each remembered history.

    Built by the stacking recursion: the memory-N vector is four copies of
    the memory-(N-1) vector offset by R, S, T, P (the payoff of the oldest
    remembered round), normalized by the window length N.
    """
    if memory < 1:
        raise ValueError("memory must be >= 1")
    rstp = params.rstp
    f = np.array(rstp)
    for _ in range(memory - 1):
        f = np.concatenate([f + v for v in rstp])
    return f / memory


def payoff_by_stationary(p: Strategy, q: Strategy, params: PayoffParams) -> float:
    """Leader payoff as <nu, f> over the stationary distribution."""
    matrix = build_matrix_direct(p, q)
    nu = stationary(matrix)
    f = build_payoff_vector(params, matrix.memory)
    return float(nu @ f)


def payoff_by_determinant(
    p: Strategy, q: Strategy, params: PayoffParams, matrix: TransitionMatrix = None
) -> float:
    """Leader payoff as a ratio of determinants.

    Both determinants take M - I and overwrite the last column, by f for the
    numerator and by ones for the denominator; the common cofactor scale
    cancels in the ratio.
    """
    if matrix is None:
        matrix = build_matrix_direct(p, q)
    f = build_payoff_vector(params, matrix.memory)
    base = matrix.entries - np.eye(matrix.entries.shape[0])
    numerator = base.copy()
    numerator[:, -1] = f
    denominator = base.copy()
    denominator[:, -1] = 1.0
    det_den = np.linalg.det(denominator)
    if not np.isfinite(det_den) or det_den == 0.0:
        raise SingularPayoffError("determinant formula singular")
    return float(np.linalg.det(numerator) / det_den)


def _fraction_vector(params: PayoffParams, memory: int) -> list:
    rstp = [
        Fraction(params.b) - Fraction(params.c),
        -Fraction(params.c),
        Fraction(params.b),
        Fraction(0),
    ]
    f = list(rstp)
    for _ in range(memory - 1):
        f = [prev + v for v in rstp for prev in f]
    return [value / memory for value in f]


def reversal_identity_check(params: PayoffParams, memory: int):
    """Exact check of -f + (R+P) 1 = (anti-diagonal) f; returns (holds, R+P).

    Flipping every symbol of a history (C <-> D) swaps R with P and S with T,
    so paired entries of f sum to the constant R+P. The check runs in exact
    rational arithmetic so "holds" means an identity, not a tolerance.
    """
    f = _fraction_vector(params, memory)
    constant = Fraction(params.b) - Fraction(params.c)  # R + P
    n = len(f)
    holds = all(-f[i] + constant == f[n - 1 - i] for i in range(n))
    return holds, float(constant)


def check_well_defined(
    params: PayoffParams,
    memory: int,
    a: float = 0.0,
    _follower_d_offset: float = 0.0,
) -> bool:
    """Leader and follower accumulate identical winnings per shared word.

    Reconstructs, from the per-choice payoffs, the total winnings each player
    attributes to a 2N-symbol conditioning word: the odd positions are the
    player's own choices (each yields a or c to itself) and the even positions
    are the co-player's (each grants b or d). The two reconstructions follow
    their own seat's semantics and must agree entrywise; _follower_d_offset
    exists for tests to break the symmetry deliberately.
    """
    raw = raw_from_donation(params, a)
    n = 4**memory
    leader = np.empty(n)
    follower = np.empty(n)
    for index in range(n):
        bits = [(index >> shift) & 1 for shift in reversed(range(2 * memory))]
        # Leader's word: rounds oldest first, own choice then the reply.
        total = 0.0
        for k in range(memory):
            own, other = bits[2 * k], bits[2 * k + 1]
            total += raw.a if own == 0 else raw.c
            total += raw.b if other == 0 else raw.d
        leader[index] = total
        # Follower's word: own oldest choice, then leader/own pairs, then the
        # leader's fresh choice; slots alternate own, leader, own, leader, ...
        total = 0.0
        d_here = raw.d + _follower_d_offset
        for pos, bit in enumerate(bits):
            if pos % 2 == 0:
                total += raw.a if bit == 0 else raw.c
            else:
                total += raw.b if bit == 0 else d_here
        follower[index] = total
    return bool(np.array_equal(leader, follower))
