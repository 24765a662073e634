"""Deterministic 64-bit random number generation.

The generator is fully specified (see ``docs/rng.md``) so that compiled and
pure-Python code, or a re-implementation in another language, can reproduce
the exact same streams:

* state seeding and stream derivation use the splitmix64 finalizer,
* the stream itself is xoshiro256** (Blackman & Vigna),
* doubles are the top 53 bits of a draw, scaled by 2**-53,
* normals come from Box-Muller pairs,
* shuffles are Fisher-Yates with modulo-reduced bounded draws.

Substreams derived from (seed, stream_id) are pure functions of those two
integers: they do not depend on how much of the parent stream was consumed,
which makes per-tree / per-fold parallelism reproducible.
"""

from __future__ import annotations

import math

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_INV_2_53 = 2.0 ** -53


def mix64(x: int) -> int:
    """splitmix64 finalizer: a fixed 64-bit avalanche mix."""
    x &= _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    x ^= x >> 31
    return x


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


def seed_state(seed: int) -> list[int]:
    """Expand a 64-bit seed into the four xoshiro256** state words."""
    sm = seed & _MASK64
    state = []
    for _ in range(4):
        sm = (sm + _GOLDEN) & _MASK64
        state.append(mix64(sm))
    if not any(state):
        state[0] = 1  # xoshiro forbids the all-zero state
    return state


class SeededRng:
    """xoshiro256** stream with splitmix64 seeding.

    Instances are single-owner: share streams across parallel units only via
    :meth:`substream`, never by handing the same object around.
    """

    __slots__ = ("seed", "_s")

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self._s = seed_state(seed)

    def __repr__(self) -> str:
        return f"SeededRng(seed={self.seed})"

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s[1] << 17) & _MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def state(self) -> tuple[int, int, int, int]:
        """Current state words (for handing a stream to compiled kernels)."""
        return tuple(self._s)

    def set_state(self, state) -> None:
        self._s = [int(w) & _MASK64 for w in state]

    def uniform(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits of one draw."""
        return (self.next_u64() >> 11) * _INV_2_53

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by modulo reduction.

        The modulo bias is below n / 2**64, negligible for the n used here.
        """
        if n <= 0:
            raise ValueError("below() requires n >= 1")
        return self.next_u64() % n

    def normal_pair(self) -> tuple[float, float]:
        """Two independent standard normals via Box-Muller."""
        u1 = self.uniform()
        while u1 <= 0.0:
            u1 = self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        return r * math.cos(theta), r * math.sin(theta)

    def normals(self, count: int) -> list[float]:
        """``count`` standard normals; the spare of the last pair is dropped."""
        out = []
        for _ in range((count + 1) // 2):
            a, b = self.normal_pair()
            out.append(a)
            out.append(b)
        return out[:count]

    def uniforms(self, count: int) -> list[float]:
        return [self.uniform() for _ in range(count)]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def permutation(self, n: int) -> list[int]:
        items = list(range(n))
        self.shuffle(items)
        return items

    def sample_indices(self, n: int, k: int) -> list[int]:
        """First k entries of a partial Fisher-Yates pass over range(n)."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot sample {k} of {n}")
        items = list(range(n))
        for i in range(k):
            j = i + self.below(n - i)
            items[i], items[j] = items[j], items[i]
        return items[:k]

    def substream(self, stream_id: int) -> "SeededRng":
        return derive_substream(self, stream_id)


def derive_substream(rng: SeededRng, stream_id: int) -> SeededRng:
    """Child stream seeded by mix64(seed + GOLDEN * (stream_id + 1)).

    A pure function of (parent seed, stream_id): independent of how much of
    the parent or any sibling stream has been consumed.
    """
    child_seed = mix64((rng.seed + _GOLDEN * ((stream_id & _MASK64) + 1)) & _MASK64)
    return SeededRng(child_seed)
