import hashlib
import struct

import pytest
from hypothesis import given, strategies as st

from pmkrsa.primegen import (
    SMALL_PRIMES,
    Drbg,
    OSEntropy,
    gen_prime,
    miller_rabin,
    source_from_env,
)

CARMICHAEL = [561, 1105, 1729, 2465, 2821, 6601, 8911, 41041, 825265, 321197185]
MERSENNE_EXPONENTS = [13, 17, 19, 31, 61, 89, 107, 127]


def sieve_is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def test_drbg_first_block_matches_definition():
    seed = bytes(range(32))
    want = hashlib.sha256(seed + struct.pack(">Q", 0)).digest()
    want += hashlib.sha256(seed + struct.pack(">Q", 1)).digest()
    assert Drbg(seed).randbytes(64) == want


def test_drbg_stream_independent_of_read_sizes():
    a, b = Drbg(bytes(32)), Drbg(bytes(32))
    whole = a.randbytes(100)
    parts = b.randbytes(7) + b.randbytes(40) + b.randbytes(53)
    assert whole == parts


def test_drbg_spawn():
    seed = bytes(32)
    parent = Drbg(seed)
    child = parent.spawn(3)
    assert child.seed == hashlib.sha256(seed + struct.pack(">Q", 3)).digest()
    retry = parent.spawn(3, 2)
    assert retry.seed == hashlib.sha256(seed + struct.pack(">Q", 3) + struct.pack(">I", 2)).digest()
    assert parent.spawn(0).randbytes(32) != parent.spawn(1).randbytes(32)
    assert parent.counter == 0


def test_drbg_seed_validation():
    with pytest.raises(ValueError):
        Drbg(b"short")
    with pytest.raises(ValueError):
        Drbg.from_hex("ab")
    assert Drbg.from_hex("00" * 32).seed == bytes(32)


def test_source_from_env(monkeypatch):
    monkeypatch.delenv("PMKRSA_TEST_SEED", raising=False)
    assert isinstance(source_from_env(), OSEntropy)
    monkeypatch.setenv("PMKRSA_TEST_SEED", "11" * 32)
    src = source_from_env()
    assert isinstance(src, Drbg) and src.seed == b"\x11" * 32
    assert source_from_env("22" * 32).seed == b"\x22" * 32


@given(st.integers(1, 2**130))
def test_randbelow_in_range(n):
    assert 0 <= Drbg(n.to_bytes(32, "big")).randbelow(n) < n


def test_randrange_and_randbits():
    rng = Drbg(bytes(32))
    vals = [rng.randrange(2, 5) for _ in range(200)]
    assert set(vals) == {2, 3, 4}
    assert all(rng.randbits(9) < 512 for _ in range(100))
    assert rng.randbits(0) == 0
    with pytest.raises(ValueError):
        rng.randrange(5, 5)
    with pytest.raises(ValueError):
        rng.randbelow(0)


def test_small_primes_table():
    assert SMALL_PRIMES[:6] == [2, 3, 5, 7, 11, 13]
    assert SMALL_PRIMES[-1] == 65521
    assert len(SMALL_PRIMES) == 6542


def test_exact_below_limit():
    assert [n for n in range(3000) if miller_rabin(n)] == [n for n in range(3000) if sieve_is_prime(n)]


@pytest.mark.parametrize("n", CARMICHAEL)
def test_rejects_carmichael(n):
    assert not miller_rabin(n, rng=Drbg(bytes(32)))


@pytest.mark.parametrize("p", MERSENNE_EXPONENTS)
def test_accepts_mersenne_primes(p):
    assert miller_rabin(2**p - 1, rng=Drbg(bytes(32)))


def test_rejects_large_semiprime():
    p, q = 2**61 - 1, 2**89 - 1
    assert not miller_rabin(p * q, rng=Drbg(bytes(32)))
    assert not miller_rabin(2**128, rng=Drbg(bytes(32)))


@pytest.mark.parametrize("bits", [8, 16, 33, 256, 512])
def test_gen_prime_shape(bits):
    rng = Drbg(bits.to_bytes(32, "big"))
    p = gen_prime(bits, rng)
    assert p.bit_length() == bits
    assert p >> (bits - 2) == 0b11
    assert p & 1
    assert miller_rabin(p, rng=rng)


def test_gen_prime_deterministic_and_bounds():
    assert gen_prime(128, Drbg(bytes(32))) == gen_prime(128, Drbg(bytes(32)))
    with pytest.raises(ValueError):
        gen_prime(7, Drbg(bytes(32)))
