"""Deterministic 64-bit pseudo-random generator for permutation replicates.

Permutation p-values must be bit-reproducible across runs, machines, and
reimplementations, so the generator is pinned down completely here instead
of delegating to whatever a numpy release happens to ship:

* Stream generator: **xoshiro256\\*\\*** (Blackman & Vigna), 64-bit output.
* State seeding: **splitmix64**, the seeding procedure recommended for the
  xoshiro family.
* Replicate streams: replicate ``b`` of a run with seed ``s`` uses the
  xoshiro state seeded from ``mix64(mix64(s) + b)``, so each replicate is a
  pure function of ``(s, b)`` and replicates may be evaluated in any order
  or in parallel.
* Bounded draws: rejection sampling (draw a 64-bit word, reject values at
  or above the largest multiple of ``n`` below 2**64, reduce modulo ``n``),
  which is exactly uniform.
* Permutations: backward Fisher-Yates (``i`` from ``n-1`` down to ``1``,
  swap with ``j = draw below i+1``).

Reference first outputs, for cross-checking a reimplementation:

* ``mix64``: ``mix64(0) = 16294208416658607535`` (0xE220A8397B1DCDAF, the
  published splitmix64 output for seed 0), ``mix64(1) = 10451216379200822465``,
  ``mix64(42) = 13679457532755275413``.
* ``Xoshiro256StarStar(seed=42)`` first four ``next_u64`` outputs:
  ``1546998764402558742, 6990951692964543102, 12544586762248559009,
  17057574109182124193``.
* ``permutation(10, seed=42, replicate=1)`` =
  ``[9, 4, 1, 6, 2, 5, 0, 8, 3, 7]``.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """One splitmix64 step for state ``x`` (add golden ratio, then mix)."""
    z = (x + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class Xoshiro256StarStar:
    """xoshiro256** stream seeded through splitmix64.

    The four state words are the first four splitmix64 outputs for the
    given seed, which guarantees a non-zero state.
    """

    __slots__ = ("_s",)

    def __init__(self, seed: int):
        state = []
        z = seed & _MASK64
        for _ in range(4):
            word = mix64(z)
            z = (z + _GOLDEN) & _MASK64
            state.append(word)
        self._s = state

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (s1 * 5) & _MASK64
        result = (((result << 7) | (result >> 57)) & _MASK64) * 9 & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK64
        self._s = [s0, s1, s2, s3]
        return result

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` via unbiased rejection sampling."""
        if n <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n


def replicate_rng(seed: int, replicate: int) -> Xoshiro256StarStar:
    """Independent stream for one permutation replicate; pure in (seed, replicate)."""
    return Xoshiro256StarStar(mix64(mix64(seed) + replicate))


def permutation(n: int, seed: int, replicate: int) -> np.ndarray:
    """Deterministic permutation of ``range(n)`` for the given replicate.

    Backward Fisher-Yates driven by :func:`replicate_rng`; the result is a
    pure function of ``(n, seed, replicate)``.
    """
    rng = replicate_rng(seed, replicate)
    out = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.below(i + 1)
        out[i], out[j] = out[j], out[i]
    return np.asarray(out, dtype=np.intp)
