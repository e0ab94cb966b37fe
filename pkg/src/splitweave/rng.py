"""Deterministic 64-bit pseudorandom streams.

Everything random in this package flows through SplitMix64, a counter-based
scheme with fixed published constants, so that identical seeds produce
identical corpora on every platform and in every worker process. Substreams
are derived by hashing (seed, purpose tag, indices) through the same mixer,
which keeps independent pipeline stages decoupled from draw order.
"""

from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF

# SplitMix64 constants (Steele, Lea & Flood's published values).
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# FNV-1a 64-bit, used to fold purpose tags into substream seeds.
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def mix64(x: int) -> int:
    """SplitMix64 finalizer: a bijective avalanche on 64-bit integers."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * _MIX1) & MASK64
    x = ((x ^ (x >> 27)) * _MIX2) & MASK64
    return x ^ (x >> 31)


def fnv1a(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & MASK64
    return h


def derive(seed: int, tag: str, *indices: int) -> int:
    """Derive a substream seed from (seed, tag, indices).

    The final index is folded through a bijection, so for a fixed prefix
    distinct trailing indices can never collide.
    """
    h = mix64((seed & MASK64) ^ fnv1a(tag.encode("utf-8")))
    for idx in indices:
        h = mix64(h ^ (idx & MASK64))
    return h


class Rng:
    """SplitMix64 stream: state advances by the golden-gamma increment."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & MASK64
        return mix64(self._state)

    def unit(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.unit()

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] inclusive (modulo fold; spans here are
        tiny relative to 2^64, so the bias is far below observability)."""
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        return lo + self.next_u64() % (hi - lo + 1)

    def choice(self, items):
        if not items:
            raise ValueError("choice from empty sequence")
        return items[self.randint(0, len(items) - 1)]

    def weighted_choice(self, pairs):
        """pairs: sequence of (item, weight). Deterministic linear scan."""
        total = sum(w for _, w in pairs)
        if total <= 0:
            raise ValueError("weights must sum to a positive value")
        x = self.unit() * total
        acc = 0.0
        for item, w in pairs:
            acc += w
            if x < acc:
                return item
        return pairs[-1][0]

    def shuffle(self, items: list) -> list:
        """In-place Fisher-Yates; returns the list for chaining."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(0, i)
            items[i], items[j] = items[j], items[i]
        return items


def unit_from_key(seed: int, tag: str, *indices: int) -> float:
    """One-shot uniform in [0, 1) keyed by (seed, tag, indices)."""
    return (derive(seed, tag, *indices) >> 11) * (1.0 / (1 << 53))
