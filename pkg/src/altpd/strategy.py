"""Memory-N strategies for the alternating prisoner's dilemma.

Encoding contract used throughout the package:

* A game history is a word of 2N symbols over {C, D}, oldest round first.
  Within each round the leader's choice comes before the follower's reply,
  so the leader's word reads (x_N, y_N, ..., x_1, y_1) with x_k / y_k the
  leader / follower choices k rounds ago.
* C maps to bit 0 and D to bit 1; the first symbol is the most significant
  bit, so a word is read as a base-2 integer in [0, 4^N).
* The follower decides knowing the leader's choice of the current round:
  its conditioning word drops the oldest leader symbol and appends the
  leader's fresh choice (own action N rounds ago first, then alternating
  leader/follower pairs, then the fresh leader action).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

__all__ = [
    "Action",
    "History",
    "Strategy",
    "PayoffParams",
    "RawPayoffs",
    "encode_history",
    "decode_history",
    "follower_index",
    "state_label",
    "validate_raw",
    "raw_from_donation",
    "all_c",
    "all_d",
    "random_strategy",
    "tit_for_tat",
]


class Action(IntEnum):
    """Cooperate / defect, with the bit values used in history words."""

    C = 0
    D = 1

    @classmethod
    def parse(cls, value) -> "Action":
        if isinstance(value, Action):
            return value
        if isinstance(value, str) and value.upper() in ("C", "D"):
            return cls[value.upper()]
        if value in (0, 1):
            return cls(int(value))
        raise ValueError(f"action must be one of C, D, 0, 1; got {value!r}")


def _validate_word(word: str) -> None:
    if len(word) < 2 or len(word) % 2 != 0:
        raise ValueError("history length must be 2N")
    bad = set(word) - {"C", "D"}
    if bad:
        raise ValueError(f"history symbols must be C or D; got {sorted(bad)}")


@dataclass(frozen=True)
class History:
    """A 2N-symbol history word, oldest round first."""

    word: str

    def __post_init__(self):
        _validate_word(self.word)

    @property
    def memory(self) -> int:
        return len(self.word) // 2

    @property
    def index(self) -> int:
        return encode_history(self.word)


def encode_history(history) -> int:
    """Binary index of a history word (C=0, D=1, first symbol most significant)."""
    word = history.word if isinstance(history, History) else str(history)
    _validate_word(word)
    index = 0
    for symbol in word:
        index = (index << 1) | (symbol == "D")
    return index


def decode_history(index: int, memory: int) -> History:
    """Inverse of :func:`encode_history` for a given memory length."""
    if memory < 1:
        raise ValueError("memory must be >= 1")
    n_bits = 2 * memory
    if not 0 <= index < 1 << n_bits:
        raise ValueError(f"index must lie in [0, {1 << n_bits}) for memory {memory}")
    bits = ((index >> shift) & 1 for shift in reversed(range(n_bits)))
    return History("".join("D" if b else "C" for b in bits))


def state_label(index: int, memory: int) -> str:
    """Human-readable label, round pairs joined by '|' (e.g. 'CD|DC')."""
    word = decode_history(index, memory).word
    return "|".join(word[i : i + 2] for i in range(0, len(word), 2))


def follower_index(history, leader_action) -> int:
    """Conditioning index of the follower given the leader's fresh action.

    Drops the first symbol of the history (the leader's oldest action) and
    appends the leader's current action.
    """
    if isinstance(history, (History, str)):
        h = encode_history(history)
        memory = (len(history.word if isinstance(history, History) else history)) // 2
    else:
        raise ValueError("history must be a History or a history word string")
    a = Action.parse(leader_action)
    mask = (1 << (2 * memory)) - 1
    return ((h << 1) | int(a)) & mask


def _follower_index_bits(h: int, a: int, mask: int) -> int:
    # Hot-path variant on raw bits; h is a 2N-bit word, a in {0, 1}.
    return ((h << 1) | a) & mask


@dataclass(frozen=True)
class Strategy:
    """Vector of cooperation probabilities indexed by history words.

    probs[i] is the probability of playing C given the history with binary
    index i; the length must be 4^N for the memory-N game.
    """

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float).copy()
        if probs.ndim != 1:
            raise ValueError("strategy must be a flat probability vector")
        n = probs.size
        memory = 0
        while n > 1:
            if n % 4:
                raise ValueError("strategy length must be 4^N")
            n //= 4
            memory += 1
        if memory < 1:
            raise ValueError("strategy length must be 4^N with N >= 1")
        if np.any(probs < 0.0) or np.any(probs > 1.0):
            raise ValueError("strategy entries must lie in [0, 1]")
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "_memory", memory)

    @property
    def memory(self) -> int:
        return self._memory

    @property
    def n_states(self) -> int:
        return self.probs.size

    def __getitem__(self, index: int) -> float:
        return float(self.probs[index])


def all_c(memory: int) -> Strategy:
    """Unconditional cooperation."""
    return Strategy(np.ones(4**memory))


def all_d(memory: int) -> Strategy:
    """Unconditional defection."""
    return Strategy(np.zeros(4**memory))


def random_strategy(memory: int, rng: np.random.Generator) -> Strategy:
    """Uniformly random reaction probabilities."""
    return Strategy(rng.random(4**memory))


def tit_for_tat(memory: int) -> Strategy:
    """Mirror the co-player's most recent recorded action.

    The last symbol of a conditioning word is always the co-player's freshest
    action (the follower's previous reply for the leader, the leader's current
    choice for the follower), so one rule serves both seats: cooperate iff
    that symbol is C.
    """
    n = 4**memory
    probs = np.array([1.0 - (i & 1) for i in range(n)])
    return Strategy(probs)


@dataclass(frozen=True)
class PayoffParams:
    """Donation-game parameters: benefit b and cost c with 0 < c < b.

    The per-round totals for the pair (leader action, follower action) are
    R = b - c (CC), S = -c (CD), T = b (DC), P = 0 (DD). They satisfy the
    equal-gains-from-switching identity R + P = S + T.
    """

    b: float = 1.0
    c: float = 0.3

    def __post_init__(self):
        if not 0.0 < self.c < self.b:
            raise ValueError("donation parameters require 0 < c < b")

    @property
    def r(self) -> float:
        return self.b - self.c

    @property
    def s(self) -> float:
        return -self.c

    @property
    def t(self) -> float:
        return self.b

    @property
    def p(self) -> float:
        return 0.0

    @property
    def rstp(self) -> tuple:
        return (self.r, self.s, self.t, self.p)


@dataclass(frozen=True)
class RawPayoffs:
    """Per-choice payoffs: cooperating yields a to self and b to the other;
    defecting yields c to self and d to the other."""

    a: float
    b: float
    c: float
    d: float


def validate_raw(raw: RawPayoffs) -> bool:
    """Prisoner's-dilemma validity: defecting tempts (c > a) but mutual
    cooperation beats alternating exploitation (c - a < b - d)."""
    return raw.c > raw.a and (raw.c - raw.a) < (raw.b - raw.d)


def raw_from_donation(params: PayoffParams, a: float = 0.0) -> RawPayoffs:
    """A one-parameter family of valid per-choice payoffs for the donation game."""
    return RawPayoffs(a=a, b=-a + params.b, c=a + params.c, d=-a - params.c - params.b)
