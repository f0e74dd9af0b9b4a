"""Pseudorandom number generators for the sweep engine.

Two word generators are provided: the standard MT19937 Mersenne twister
(bit-exact against the reference algorithm) and an additive lagged-Fibonacci
generator with taps at 418 and 1279.  Both emit unsigned 32-bit words.
"""

from __future__ import annotations

import numpy as np

_MASK32 = 0xFFFFFFFF

# MT19937 constants
_N = 624
_M = 397
_MATRIX_A = 0x9908B0DF
_UPPER = 0x80000000
_LOWER = 0x7FFFFFFF


class MT19937:
    """Mersenne twister MT19937, bit-exact, with block-vectorized generation.

    Seeding follows the reference code: an int seed uses the standard
    integer initializer, ``from_key`` the array initializer.
    """

    def __init__(self, seed: int = 5489):
        mt = np.empty(_N, dtype=np.uint64)
        mt[0] = seed & _MASK32
        for i in range(1, _N):
            mt[i] = (1812433253 * (mt[i - 1] ^ (mt[i - 1] >> np.uint64(30))) + i) & _MASK32
        self._mt = mt.astype(np.uint32)
        self._buf = np.empty(0, dtype=np.uint32)
        self._pos = 0

    @classmethod
    def from_key(cls, key) -> "MT19937":
        """Seed from a sequence of ints (the reference init_by_array)."""
        key = [int(k) & _MASK32 for k in key]
        if not key:
            raise ValueError("empty seed key")
        gen = cls(19650218)
        mt = [int(w) for w in gen._mt]
        i, j = 1, 0
        for _ in range(max(len(key), _N)):
            mt[i] = ((mt[i] ^ ((mt[i - 1] ^ (mt[i - 1] >> 30)) * 1664525)) + key[j] + j) & _MASK32
            i += 1
            j += 1
            if i >= _N:
                mt[0] = mt[_N - 1]
                i = 1
            if j >= len(key):
                j = 0
        for _ in range(_N - 1):
            mt[i] = ((mt[i] ^ ((mt[i - 1] ^ (mt[i - 1] >> 30)) * 1566083941)) - i) & _MASK32
            i += 1
            if i >= _N:
                mt[0] = mt[_N - 1]
                i = 1
        mt[0] = 0x80000000
        gen._mt = np.array(mt, dtype=np.uint32)
        gen._buf = np.empty(0, dtype=np.uint32)
        gen._pos = 0
        return gen

    def _refill(self) -> None:
        # Twist in place.  The reference loop updates the state sequentially,
        # so later entries read already-twisted words; the slices below
        # reproduce that dependency order exactly.
        mt = self._mt
        low = np.uint32(_LOWER)
        high = np.uint32(_UPPER)
        one = np.uint32(1)
        a = np.uint32(_MATRIX_A)

        y = (mt[0:227] & high) | (mt[1:228] & low)
        mt[0:227] = mt[397:624] ^ (y >> one) ^ ((y & one) * a)
        y = (mt[227:454] & high) | (mt[228:455] & low)
        mt[227:454] = mt[0:227] ^ (y >> one) ^ ((y & one) * a)
        y = (mt[454:623] & high) | (mt[455:624] & low)
        mt[454:623] = mt[227:396] ^ (y >> one) ^ ((y & one) * a)
        y = (mt[623] & high) | (mt[0] & low)
        mt[623] = mt[396] ^ (y >> one) ^ ((y & one) * a)

        # Temper a private copy to serve from.
        y = mt.copy()
        y ^= y >> np.uint32(11)
        y ^= (y << np.uint32(7)) & np.uint32(0x9D2C5680)
        y ^= (y << np.uint32(15)) & np.uint32(0xEFC60000)
        y ^= y >> np.uint32(18)
        self._buf = y
        self._pos = 0

    def next_word(self) -> int:
        """Next 32-bit output word."""
        if self._pos >= len(self._buf):
            self._refill()
        w = int(self._buf[self._pos])
        self._pos += 1
        return w

    def words(self, count: int) -> np.ndarray:
        """Next ``count`` output words as a uint32 array."""
        out = np.empty(count, dtype=np.uint32)
        for i in range(count):
            out[i] = self.next_word()
        return out

    def getstate(self):
        """(state vector, number of state words already consumed)."""
        if self._pos >= len(self._buf):
            return self._mt.copy(), _N
        return self._mt.copy(), self._pos


# Additive lagged-Fibonacci (Mitchell-Moore) parameters.
_SHORT_LAG = 418
_LONG_LAG = 1279
_LFG_TAG = 0x4C4647  # mixed into the fill key so the stream differs from plain MT output
_WARMUP = 10 * _LONG_LAG


class LaggedFibonacci:
    """Additive lagged-Fibonacci generator: x[t] = x[t-418] + x[t-1279] mod 2^32.

    The state is filled from an MT19937 stream keyed by ``key``; one state
    word is forced odd so the maximal period is reached.  ``decimation`` = d
    keeps one raw word in d (d=1 disables decimation).
    """

    def __init__(self, key=(0,), decimation: int = 2):
        if decimation < 1:
            raise ValueError("decimation must be >= 1")
        filler = MT19937.from_key(tuple(key) + (_LFG_TAG,))
        state = [filler.next_word() for _ in range(_LONG_LAG)]
        state[0] |= 1
        self._s = state
        self._p = 0
        self.decimation = decimation
        for _ in range(_WARMUP):
            self._raw()

    def _raw(self) -> int:
        s = self._s
        j = self._p
        k = j - _SHORT_LAG
        if k < 0:
            k += _LONG_LAG
        w = (s[j] + s[k]) & _MASK32
        s[j] = w
        j += 1
        self._p = j if j < _LONG_LAG else 0
        return w

    def next_word(self) -> int:
        w = 0
        for _ in range(self.decimation):
            w = self._raw()
        return w

    def getstate(self):
        """(circular state buffer, next write position)."""
        return np.array(self._s, dtype=np.uint32), self._p


def bounded_uniform(gen, m: int) -> int:
    """Exactly uniform integer in [0, m) from a 32-bit word generator.

    Candidates are taken from the most significant bits of each word and the
    biased tail is rejected, so there is no modulo bias and the weaker low
    bits of additive generators are never used.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if m == 1:
        return 0
    shift = 32 - (m - 1).bit_length()
    while True:
        c = gen.next_word() >> shift
        if c < m:
            return c


def make_generator(kind: str, key, decimation: int = 2):
    if kind == "mt19937":
        return MT19937.from_key(key)
    if kind == "lfg":
        return LaggedFibonacci(key, decimation=decimation)
    raise ValueError(f"unknown generator kind: {kind!r}")


class RngStream:
    """A seeded word source for one engine instance.

    ``pairing`` selects how sites are drawn: "single" consumes one stream
    through rejection-sampled bounded draws, "xy" keeps an independently
    keyed generator per coordinate.  Shard workers derive disjoint streams
    from (seed, shard) via the MT19937 array initializer.
    """

    def __init__(self, kind: str = "mt19937", seed: int = 0, shard: int = 0,
                 pairing: str = "single", decimation: int = 2):
        if pairing not in ("single", "xy"):
            raise ValueError(f"unknown pairing mode: {pairing!r}")
        self.kind = kind
        self.seed = int(seed) & _MASK32
        self.shard = int(shard)
        self.pairing = pairing
        self.decimation = decimation
        base = (self.seed, self.shard)
        if pairing == "single":
            self.primary = make_generator(kind, base, decimation)
            self.pair = None
        else:
            self.primary = make_generator(kind, base + (0,), decimation)
            self.pair = make_generator(kind, base + (1,), decimation)

    def next_word(self) -> int:
        return self.primary.next_word()

    def bounded(self, m: int) -> int:
        return bounded_uniform(self.primary, m)

    def draw_coords(self, L: int):
        """(x, y) from the independent coordinate pair (xy mode only)."""
        return bounded_uniform(self.primary, L), bounded_uniform(self.pair, L)
