"""Modular arithmetic kernels: gcd, inverses, Montgomery REDC, modexp.

Big integers are plain Python ``int`` values. The limb view used by the
compiled kernel is exposed through :func:`to_limbs` / :func:`from_limbs`.

Nothing here is constant time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from pmkrsa import _backend
from pmkrsa.errors import EvenModulus, NotInvertible, ZeroModulus

LIMB_BITS = 64


def bit_length(x: int) -> int:
    if x < 0:
        raise ValueError("negative integers are not supported")
    return x.bit_length()


def to_limbs(x: int, width: int = LIMB_BITS) -> list[int]:
    """Little-endian limbs of ``x`` without leading zero limbs ([] for 0)."""
    if x < 0:
        raise ValueError("negative integers are not supported")
    mask = (1 << width) - 1
    limbs = []
    while x:
        limbs.append(x & mask)
        x >>= width
    return limbs


def from_limbs(limbs, width: int = LIMB_BITS) -> int:
    x = 0
    for limb in reversed(limbs):
        x = (x << width) | limb
    return x


def to_hex(x: int) -> str:
    """Lowercase big-endian hex, no prefix."""
    if x < 0:
        raise ValueError("negative integers are not supported")
    return format(x, "x")


def from_hex(s: str) -> int:
    s = s.strip()
    if not s or s.startswith(("-", "+", "0x", "0X")):
        raise ValueError(f"not a bare hex magnitude: {s!r}")
    return int(s, 16)


def gcd(a: int, b: int) -> int:
    return math.gcd(a, b)


def mod_inv(a: int, N: int) -> int:
    """Inverse of ``a`` modulo ``N``, in [1, N)."""
    if N < 2:
        raise ZeroModulus(f"modulus must be >= 2, got {N}")
    if math.gcd(a, N) != 1:
        raise NotInvertible(f"gcd(a, N) != 1 for N of {N.bit_length()} bits")
    return pow(a, -1, N)


def mod_mul_plain(a: int, b: int, N: int) -> int:
    if N == 0:
        raise ZeroModulus("modulus is zero")
    return (a * b) % N


@dataclass(frozen=True)
class MontCtx:
    """Precomputed Montgomery context for one odd modulus, R = 2**k."""

    modulus: int
    k: int
    n_prime: int
    r2: int

    @property
    def r(self) -> int:
        return 1 << self.k


def _inv_pow2(N: int, k: int) -> int:
    """N^-1 mod 2**k for odd N by Newton lifting; each step doubles the precision."""
    x, bits = 1, 1
    while bits < k:
        bits = min(2 * bits, k)
        x = (x * (2 - N * x)) & ((1 << bits) - 1)
    return x


def mont_new(N: int, limb_bits: int = LIMB_BITS) -> MontCtx:
    if N % 2 == 0:
        raise EvenModulus(f"Montgomery reduction needs an odd modulus, got {N}")
    if N <= 2:
        raise ZeroModulus(f"modulus must exceed 2, got {N}")
    k = -(-N.bit_length() // limb_bits) * limb_bits
    r = 1 << k
    n_prime = (-_inv_pow2(N, k)) % r
    return MontCtx(modulus=N, k=k, n_prime=n_prime, r2=(r * r) % N)


def mont_mul(ctx: MontCtx, a_hat: int, b_hat: int) -> int:
    """REDC(a_hat * b_hat) = a_hat * b_hat * r^-1 mod N."""
    kern = _backend.for_width(ctx.k)
    return kern.mont_mul(a_hat, b_hat, ctx.modulus, ctx.n_prime, ctx.k)


def to_mont(ctx: MontCtx, x: int) -> int:
    return mont_mul(ctx, x, ctx.r2)


def from_mont(ctx: MontCtx, x_hat: int) -> int:
    return mont_mul(ctx, x_hat, 1)


def mod_pow(x: int, e: int, N: int, ctx: MontCtx | None = None) -> int:
    """x**e mod N by right-to-left binary square-and-multiply.

    Odd moduli run in the Montgomery domain; even moduli fall back to plain
    reduction (test and oracle paths only).
    """
    if N < 2:
        raise ZeroModulus(f"modulus must be >= 2, got {N}")
    if e < 0:
        raise ValueError("negative exponents are not supported")
    x %= N
    if N % 2 == 0:
        y = 1 % N
        while e:
            if e & 1:
                y = (y * x) % N
            e >>= 1
            if e:
                x = (x * x) % N
        return y
    if ctx is None:
        ctx = mont_new(N)
    kern = _backend.for_width(ctx.k)
    return kern.mont_pow(x, e, N, ctx.n_prime, ctx.r2, ctx.k)
