"""Baseline RSA schemes: textbook, CRT (two primes) and multi-prime.

Keys are duck-typed: anything with ``N`` and ``e`` (and ``d`` for the
private operations) works, including :class:`pmkrsa.keystore.KeyPair`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from pmkrsa.errors import MessageTooLarge, NotCoprime
from pmkrsa.modmath import mod_inv, mod_pow, mont_new


def _check_range(x, N):
    if x < 0 or x >= N:
        raise MessageTooLarge(f"value must lie in [0, N) for a {N.bit_length()}-bit modulus")


def rsa_encrypt(m: int, key) -> int:
    _check_range(m, key.N)
    return mod_pow(m, key.e, key.N)


def rsa_decrypt(c: int, key) -> int:
    _check_range(c, key.N)
    return mod_pow(c, key.d, key.N)


def crt_combine(residues, moduli, coefficients=None) -> int:
    """Unique x < prod(moduli) with x = residues[t] (mod moduli[t]).

    ``coefficients[t]``, if given, must be the inverse of prod(moduli) /
    moduli[t] modulo moduli[t]; otherwise they are computed here.
    """
    if len(residues) != len(moduli):
        raise ValueError("residues and moduli differ in length")
    if coefficients is None:
        for a in range(len(moduli)):
            for b in range(a + 1, len(moduli)):
                if math.gcd(moduli[a], moduli[b]) != 1:
                    raise NotCoprime(f"moduli {a} and {b} share a factor")
    M = math.prod(moduli)
    x = 0
    for t, (r, m) in enumerate(zip(residues, moduli)):
        Mt = M // m
        coef = coefficients[t] if coefficients is not None else mod_inv(Mt % m, m) if m > 1 else 0
        x += r * Mt * coef
    return x % M


@dataclass(frozen=True)
class CrtPrivate:
    p: int
    q: int
    d_p: int
    d_q: int
    q_inv: int

    @classmethod
    def from_primes(cls, p: int, q: int, d: int) -> CrtPrivate:
        return cls(p=p, q=q, d_p=d % (p - 1), d_q=d % (q - 1), q_inv=mod_inv(q, p))

    @cached_property
    def _ctx(self):
        return mont_new(self.p), mont_new(self.q)


def crt_decrypt(c: int, crt: CrtPrivate, N: int) -> int:
    _check_range(c, N)
    ctx_p, ctx_q = crt._ctx
    m_p = mod_pow(c % crt.p, crt.d_p, crt.p, ctx_p)
    m_q = mod_pow(c % crt.q, crt.d_q, crt.q, ctx_q)
    # (m_p - m_q) kept non-negative by adding p first
    h = (crt.q_inv * ((m_p + crt.p - m_q % crt.p) % crt.p)) % crt.p
    return m_q + h * crt.q


@dataclass(frozen=True)
class MultiPrimeKey:
    primes: tuple
    N: int
    e: int
    d: int
    crt_exponents: tuple
    crt_coefficients: tuple

    @classmethod
    def from_primes(cls, primes, e: int, d: int | None = None) -> MultiPrimeKey:
        primes = tuple(primes)
        if len(primes) < 2:
            raise ValueError("multi-prime keys need at least two primes")
        if len(set(primes)) != len(primes):
            raise ValueError("primes must be distinct")
        N = math.prod(primes)
        phi = math.prod(p - 1 for p in primes)
        if d is None:
            d = mod_inv(e, phi)
        elif (e * d) % phi != 1:
            raise ValueError("e * d != 1 mod phi(N)")
        return cls(
            primes=primes,
            N=N,
            e=e,
            d=d,
            crt_exponents=tuple(d % (p - 1) for p in primes),
            crt_coefficients=tuple(mod_inv((N // p) % p, p) for p in primes),
        )

    @property
    def bits(self) -> int:
        return self.N.bit_length()

    @cached_property
    def _ctx(self):
        return tuple(mont_new(p) for p in self.primes)


def multiprime_decrypt(c: int, key: MultiPrimeKey) -> int:
    _check_range(c, key.N)
    residues = [
        mod_pow(c % p, dp, p, ctx)
        for p, dp, ctx in zip(key.primes, key.crt_exponents, key._ctx)
    ]
    return crt_combine(residues, key.primes, key.crt_coefficients)


def gen_multiprime_key(bits: int, b: int, rng, e: int = 65537) -> MultiPrimeKey:
    """b distinct primes of about bits / b bits each, product exactly ``bits`` bits."""
    from pmkrsa.keystore import gen_keypair

    pair = gen_keypair(bits, rng, e=e, nprimes=b)
    return MultiPrimeKey.from_primes(pair.primes, pair.e, pair.d)
