import math

import pytest
from hypothesis import given, settings, strategies as st

from pmkrsa.errors import MessageTooLarge, NotCoprime
from pmkrsa.keystore import gen_keypair
from pmkrsa.primegen import Drbg
from pmkrsa.rsa_variants import (
    CrtPrivate,
    MultiPrimeKey,
    crt_combine,
    crt_decrypt,
    gen_multiprime_key,
    multiprime_decrypt,
    rsa_decrypt,
    rsa_encrypt,
)


def test_textbook_toy(toy_key):
    assert rsa_encrypt(65, toy_key) == 2790
    assert rsa_decrypt(2790, toy_key) == 65
    with pytest.raises(MessageTooLarge):
        rsa_encrypt(3233, toy_key)
    with pytest.raises(MessageTooLarge):
        rsa_decrypt(-1, toy_key)


def test_crt_toy():
    crt = CrtPrivate.from_primes(61, 53, 2753)
    assert (crt.d_p, crt.d_q, crt.q_inv) == (53, 49, 38)
    assert crt_decrypt(2790, crt, 3233) == 65


def test_crt_exhaustive_toy(toy_key):
    crt = toy_key.crt
    assert all(crt_decrypt(pow(m, 17, 3233), crt, 3233) == m for m in range(3233))


def test_crt_combine():
    assert crt_combine([4, 12], [61, 53]) == 65
    assert crt_combine([2, 3, 2], [3, 5, 7]) == 23
    with pytest.raises(NotCoprime):
        crt_combine([1, 1], [6, 9])
    with pytest.raises(ValueError):
        crt_combine([1], [3, 5])


@given(st.lists(st.sampled_from([3, 5, 7, 11, 13, 17, 19, 23]), min_size=1, max_size=5, unique=True),
       st.data())
def test_crt_combine_property(moduli, data):
    residues = [data.draw(st.integers(0, m - 1)) for m in moduli]
    x = crt_combine(residues, moduli)
    assert 0 <= x < math.prod(moduli)
    assert [x % m for m in moduli] == residues


def test_multiprime_toy():
    key = MultiPrimeKey.from_primes((11, 13, 17), 7)
    assert key.N == 2431 and key.d == 823
    assert pow(100, 7, key.N) == 2388
    assert multiprime_decrypt(2388, key) == 100
    assert all(multiprime_decrypt(pow(m, 7, 2431), key) == m for m in range(2431))


def test_multiprime_validation():
    with pytest.raises(ValueError):
        MultiPrimeKey.from_primes((11,), 7)
    with pytest.raises(ValueError):
        MultiPrimeKey.from_primes((11, 11, 13), 7)
    with pytest.raises(ValueError):
        MultiPrimeKey.from_primes((11, 13, 17), 7, d=824)


@pytest.mark.parametrize("b", [2, 3, 4])
def test_generated_multiprime(b):
    key = gen_multiprime_key(768, b, Drbg(bytes(32)))
    assert key.bits == 768 and len(key.primes) == b
    rng = Drbg(bytes([b]) * 32)
    for _ in range(5):
        m = rng.randbelow(key.N)
        assert multiprime_decrypt(pow(m, key.e, key.N), key) == m


@settings(max_examples=40, deadline=None)
@given(st.binary(min_size=32, max_size=32))
def test_three_paths_agree(seed):
    key = gen_keypair(256, Drbg(seed))
    m = Drbg(seed).spawn(9).randbelow(key.N)
    c = rsa_encrypt(m, key)
    assert rsa_decrypt(c, key) == crt_decrypt(c, key.crt, key.N) == m
    assert multiprime_decrypt(c, key.multiprime) == m
