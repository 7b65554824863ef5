"""Random sources and probabilistic prime generation.

The seeded DRBG is SHA-256 in counter mode::

    block[j] = SHA256(seed || uint64_be(j)),  j = 0, 1, 2, ...

and the output stream is the concatenation of the blocks. A child stream for
``spawn(i)`` uses ``SHA256(seed || uint64_be(i))`` as its seed, and
``spawn(i, attempt)`` with attempt > 0 appends ``uint32_be(attempt)`` before
hashing. Integers are drawn as big-endian byte strings with the excess high
bits masked off; ``randbelow`` rejects and redraws out-of-range values.
"""
from __future__ import annotations

import hashlib
import os
import struct

from pmkrsa.modmath import mod_pow

SEED_BYTES = 32
SMALL_PRIME_LIMIT = 1 << 16
DEFAULT_ROUNDS = 64


class RandomSource:
    """Byte source plus the integer helpers built on it."""

    kind = "abstract"

    def fill(self, buf: bytearray) -> None:
        raise NotImplementedError

    def spawn(self, index: int, attempt: int = 0) -> RandomSource:
        raise NotImplementedError

    def randbytes(self, n: int) -> bytes:
        buf = bytearray(n)
        self.fill(buf)
        return bytes(buf)

    def randbits(self, k: int) -> int:
        if k <= 0:
            return 0
        nbytes = (k + 7) // 8
        x = int.from_bytes(self.randbytes(nbytes), "big")
        return x >> (nbytes * 8 - k)

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("upper bound must be positive")
        k = n.bit_length()
        while True:
            x = self.randbits(k)
            if x < n:
                return x

    def randrange(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi)."""
        if hi <= lo:
            raise ValueError(f"empty range [{lo}, {hi})")
        return lo + self.randbelow(hi - lo)


class OSEntropy(RandomSource):
    kind = "os-entropy"

    def fill(self, buf):
        buf[:] = os.urandom(len(buf))

    def spawn(self, index, attempt=0):
        return OSEntropy()


class Drbg(RandomSource):
    """Deterministic SHA-256 counter-mode stream; not thread-safe."""

    kind = "seeded-drbg"

    def __init__(self, seed: bytes):
        if len(seed) != SEED_BYTES:
            raise ValueError(f"seed must be {SEED_BYTES} bytes, got {len(seed)}")
        self.seed = bytes(seed)
        self.counter = 0
        self._pending = b""

    @classmethod
    def from_hex(cls, text: str) -> Drbg:
        text = text.strip()
        if len(text) != 2 * SEED_BYTES:
            raise ValueError(f"seed must be {2 * SEED_BYTES} hex characters")
        return cls(bytes.fromhex(text))

    def _block(self) -> bytes:
        out = hashlib.sha256(self.seed + struct.pack(">Q", self.counter)).digest()
        self.counter += 1
        return out

    def fill(self, buf):
        n = len(buf)
        chunks = [self._pending]
        have = len(self._pending)
        while have < n:
            block = self._block()
            chunks.append(block)
            have += len(block)
        data = b"".join(chunks)
        buf[:] = data[:n]
        self._pending = data[n:]

    def spawn(self, index, attempt=0):
        material = self.seed + struct.pack(">Q", index)
        if attempt:
            material += struct.pack(">I", attempt)
        return Drbg(hashlib.sha256(material).digest())


def source_from_env(seed_hex: str | None = None) -> RandomSource:
    """DRBG when a seed is given (or PMKRSA_TEST_SEED is set), else OS entropy."""
    seed_hex = seed_hex or os.environ.get("PMKRSA_TEST_SEED")
    if seed_hex:
        return Drbg.from_hex(seed_hex)
    return OSEntropy()


def _sieve(limit):
    flags = bytearray([1]) * limit
    flags[0:2] = b"\x00\x00"
    for p in range(2, int(limit ** 0.5) + 1):
        if flags[p]:
            flags[p * p::p] = bytearray(len(flags[p * p::p]))
    return [i for i, f in enumerate(flags) if f]


SMALL_PRIMES = _sieve(SMALL_PRIME_LIMIT)
# Candidate filter before Miller-Rabin; ~88% of odd candidates stop here.
_FILTER_PRIMES = SMALL_PRIMES[1:300]


def _trial_division(n):
    if n < 2:
        return False
    for p in SMALL_PRIMES:
        if p * p > n:
            return True
        if n % p == 0:
            return n == p
    return True


def miller_rabin(n: int, rounds: int = DEFAULT_ROUNDS, rng: RandomSource | None = None) -> bool:
    """True for a probable prime, False for a (certain) composite.

    Values below 2**16 are decided exactly by trial division. A composite
    survives with probability at most 4**-rounds.
    """
    if n < SMALL_PRIME_LIMIT:
        return _trial_division(n)
    if n % 2 == 0:
        return False
    for p in _FILTER_PRIMES:
        if n % p == 0:
            return False
    rng = rng or OSEntropy()
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = mod_pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = (x * x) % n
            if x == n - 1:
                break
        else:
            return False
    return True


def gen_prime(bits: int, rng: RandomSource, rounds: int = DEFAULT_ROUNDS) -> int:
    """Probable prime of exactly ``bits`` bits with the top two bits set."""
    if bits < 8:
        raise ValueError(f"prime size must be >= 8 bits, got {bits}")
    top = 0b11 << (bits - 2)
    while True:
        candidate = rng.randbits(bits) | top | 1
        if miller_rabin(candidate, rounds, rng):
            return candidate
