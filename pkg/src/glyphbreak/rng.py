"""Seeded, portable randomness.

Every random choice in the toolkit flows through :class:`SplitMix64`, a fixed
64-bit generator (Steele, Lea & Flood's SplitMix). It is implemented here in
full so that selections are bit-identical across platforms, Python versions,
and library upgrades. Per-sample seeds are derived from a master seed with
SHA-256, so results never depend on evaluation order or concurrency.
"""

from __future__ import annotations

import hashlib
from typing import Sequence, TypeVar

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15

T = TypeVar("T")


class SplitMix64:
    """SplitMix64 pseudo-random generator over 64-bit state."""

    def __init__(self, seed: int):
        if not isinstance(seed, int):
            raise TypeError(f"seed must be an int, got {type(seed).__name__}")
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound) via rejection sampling (no modulo bias)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = _MASK64 + 1 - ((_MASK64 + 1) % bound)
        while True:
            value = self.next_u64()
            if value < limit:
                return value % bound

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) / (1 << 53)

    def sample_indices(self, population: int, k: int) -> list[int]:
        """k distinct indices from range(population), uniform, ascending order.

        Partial Fisher-Yates over an explicit pool, so the draw depends only
        on the generator stream.
        """
        if k < 0 or k > population:
            raise ValueError(f"cannot draw {k} from {population}")
        pool = list(range(population))
        for i in range(k):
            j = i + self.randbelow(population - i)
            pool[i], pool[j] = pool[j], pool[i]
        return sorted(pool[:k])

    def choice(self, seq: Sequence[T]) -> T:
        if not seq:
            raise ValueError("cannot choose from an empty sequence")
        return seq[self.randbelow(len(seq))]


def derive_seed(master_seed: int, *parts: int | str) -> int:
    """Stable 64-bit seed from a master seed and identifying parts.

    The derivation is SHA-256 over a versioned, unambiguous encoding, so the
    same (master_seed, parts) always yields the same seed on any platform.
    """
    pieces = [f"i:{master_seed}"]
    for part in parts:
        if isinstance(part, bool) or not isinstance(part, (int, str)):
            raise TypeError(f"seed parts must be int or str, got {type(part).__name__}")
        tag = "i" if isinstance(part, int) else "s"
        pieces.append(f"{tag}:{part}")
    payload = "\x1f".join(pieces).encode("utf-8")
    digest = hashlib.sha256(b"glyphbreak.seed.v1\x00" + payload).digest()
    return int.from_bytes(digest[:8], "big")
