"""Multi-key bundles: generation and the PMKK key-file format.

Key file layout (all integers big-endian)::

    magic "PMKK" | version u8 = 1 | kind u8 | bits u32 | rows u16
    per row, each magnitude as u32 byte count + minimal big-endian bytes:
        kind 0 (public):              e, N
        kind 1 (private):             e, N, d, p, q
        kind 2 (multi-prime private): e, N, d, u16 b, then b primes
"""
from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass, field
from functools import cached_property

from pmkrsa.errors import InvalidConfig, MalformedKeyFile
from pmkrsa.modmath import mod_inv, mont_new
from pmkrsa.parallel import ParallelConfig, par_map
from pmkrsa.primegen import RandomSource, gen_prime
from pmkrsa.rsa_variants import CrtPrivate, MultiPrimeKey, crt_decrypt, multiprime_decrypt

MAGIC = b"PMKK"
VERSION = 1
KIND_PUBLIC = 0
KIND_PRIVATE = 1
KIND_MULTIPRIME = 2
F4 = 65537

_HEADER = struct.Struct(">4sBBIH")


def default_exponent(bits: int) -> int:
    # Below 18 bits phi(N) < 65537, so toy keys fall back to 17.
    return F4 if bits >= 18 else 17


@dataclass(frozen=True)
class KeyPair:
    N: int
    e: int
    bits: int
    d: int | None = None
    primes: tuple = field(default=())

    @property
    def is_private(self) -> bool:
        return self.d is not None

    @property
    def p(self):
        return self.primes[0] if self.primes else None

    @property
    def q(self):
        return self.primes[1] if len(self.primes) > 1 else None

    @property
    def phi(self) -> int:
        return math.prod(p - 1 for p in self.primes)

    def public(self) -> KeyPair:
        return KeyPair(N=self.N, e=self.e, bits=self.bits)

    def fingerprint(self) -> str:
        raw = self.N.to_bytes((self.N.bit_length() + 7) // 8, "big")
        return hashlib.sha256(raw).hexdigest()[:16]

    def validate(self) -> None:
        """Raise ValueError if any key invariant fails."""
        if self.N.bit_length() != self.bits:
            raise ValueError(f"modulus has {self.N.bit_length()} bits, expected {self.bits}")
        if self.e < 3:
            raise ValueError("public exponent must be >= 3")
        if not self.is_private:
            return
        if len(self.primes) < 2 or len(set(self.primes)) != len(self.primes):
            raise ValueError("private key needs at least two distinct primes")
        if math.prod(self.primes) != self.N:
            raise ValueError("primes do not multiply to N")
        phi = self.phi
        if self.e >= phi or math.gcd(self.e, phi) != 1:
            raise ValueError("e must be a unit below phi(N)")
        if (self.e * self.d) % phi != 1:
            raise ValueError("e * d != 1 mod phi(N)")

    @cached_property
    def ctx(self):
        return mont_new(self.N)

    @cached_property
    def crt(self) -> CrtPrivate:
        return CrtPrivate.from_primes(self.primes[0], self.primes[1], self.d)

    @cached_property
    def multiprime(self) -> MultiPrimeKey:
        return MultiPrimeKey.from_primes(self.primes, self.e, self.d)

    def private_op(self, c: int) -> int:
        """c**d mod N through the prime factors."""
        if len(self.primes) == 2:
            return crt_decrypt(c, self.crt, self.N)
        return multiprime_decrypt(c, self.multiprime)


@dataclass(frozen=True)
class KeyBundle:
    rows: tuple
    bits: int

    def __post_init__(self):
        if not self.rows:
            raise ValueError("a bundle needs at least one key row")
        if any(row.bits != self.bits for row in self.rows):
            raise ValueError("all rows must share the bundle bit length")
        moduli = [row.N for row in self.rows]
        if len(set(moduli)) != len(moduli):
            raise ValueError("moduli must be pairwise distinct")

    def __len__(self):
        return len(self.rows)

    @property
    def is_private(self) -> bool:
        return all(row.is_private for row in self.rows)

    def public(self) -> KeyBundle:
        return KeyBundle(rows=tuple(row.public() for row in self.rows), bits=self.bits)


def _prime_sizes(bits, nprimes):
    base, extra = divmod(bits, nprimes)
    return [base + (1 if t < extra else 0) for t in range(nprimes)]


def gen_keypair(bits: int, rng: RandomSource, e: int | None = None, nprimes: int = 2,
                prime_fn=gen_prime) -> KeyPair:
    """Fresh key pair; primes are redrawn until every invariant holds."""
    if bits < 16 or bits % 2:
        raise InvalidConfig(f"key length must be even and >= 16, got {bits}")
    if nprimes < 2 or bits // nprimes < 8:
        raise InvalidConfig(f"cannot split {bits} bits into {nprimes} primes")
    e = e or default_exponent(bits)
    sizes = _prime_sizes(bits, nprimes)
    while True:
        primes = tuple(prime_fn(size, rng) for size in sizes)
        if len(set(primes)) != nprimes:
            continue
        N = math.prod(primes)
        if N.bit_length() != bits:
            continue
        phi = math.prod(p - 1 for p in primes)
        if e >= phi or math.gcd(e, phi) != 1:
            continue
        return KeyPair(N=N, e=e, bits=bits, d=mod_inv(e, phi), primes=primes)


def gen_bundle(i: int, bits: int, rng: RandomSource, e: int | None = None, nprimes: int = 2,
               config: ParallelConfig | None = None) -> KeyBundle:
    """``i`` independent key rows; row t draws from ``rng.spawn(t)``.

    The output depends only on the seed, never on the worker count.
    """
    if i < 1:
        raise InvalidConfig(f"bundle needs at least one row, got {i}")
    rows = par_map(
        range(i), lambda t, _: gen_keypair(bits, rng.spawn(t), e=e, nprimes=nprimes), config
    )
    seen = set()
    for t in range(i):
        attempt = 0
        while rows[t].N in seen:
            attempt += 1
            rows[t] = gen_keypair(bits, rng.spawn(t, attempt), e=e, nprimes=nprimes)
        seen.add(rows[t].N)
    return KeyBundle(rows=tuple(rows), bits=bits)


def _put(out, x):
    raw = x.to_bytes((x.bit_length() + 7) // 8, "big")
    out += struct.pack(">I", len(raw))
    out += raw


def _serialize(bundle, kind):
    out = bytearray(_HEADER.pack(MAGIC, VERSION, kind, bundle.bits, len(bundle.rows)))
    for row in bundle.rows:
        _put(out, row.e)
        _put(out, row.N)
        if kind == KIND_PUBLIC:
            continue
        _put(out, row.d)
        if kind == KIND_PRIVATE:
            _put(out, row.primes[0])
            _put(out, row.primes[1])
        else:
            out += struct.pack(">H", len(row.primes))
            for p in row.primes:
                _put(out, p)
    return bytes(out)


def serialize_public(bundle: KeyBundle) -> bytes:
    return _serialize(bundle, KIND_PUBLIC)


def serialize_private(bundle: KeyBundle) -> bytes:
    if not bundle.is_private:
        raise ValueError("bundle carries no private material")
    kinds = {len(row.primes) for row in bundle.rows}
    return _serialize(bundle, KIND_PRIVATE if kinds == {2} else KIND_MULTIPRIME)


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def take(self, n, what):
        if self.pos + n > len(self.data):
            raise MalformedKeyFile(f"truncated while reading {what} at offset {self.pos}")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u16(self, what):
        return struct.unpack(">H", self.take(2, what))[0]

    def magnitude(self, what):
        (n,) = struct.unpack(">I", self.take(4, what))
        return int.from_bytes(self.take(n, what), "big")


def parse_bundle(data: bytes) -> KeyBundle:
    """Parse either key-file kind; validates every row."""
    data = bytes(data)
    if len(data) < _HEADER.size:
        raise MalformedKeyFile(f"key file shorter than its {_HEADER.size}-byte header")
    magic, version, kind, bits, nrows = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise MalformedKeyFile(f"bad magic {magic!r}")
    if version != VERSION:
        raise MalformedKeyFile(f"unsupported key file version {version}")
    if kind not in (KIND_PUBLIC, KIND_PRIVATE, KIND_MULTIPRIME):
        raise MalformedKeyFile(f"unknown key kind {kind}")
    reader = _Reader(data)
    reader.pos = _HEADER.size
    rows = []
    for t in range(nrows):
        e = reader.magnitude(f"row {t} e")
        N = reader.magnitude(f"row {t} N")
        if kind == KIND_PUBLIC:
            row = KeyPair(N=N, e=e, bits=bits)
        else:
            d = reader.magnitude(f"row {t} d")
            if kind == KIND_PRIVATE:
                primes = (reader.magnitude(f"row {t} p"), reader.magnitude(f"row {t} q"))
            else:
                b = reader.u16(f"row {t} prime count")
                primes = tuple(reader.magnitude(f"row {t} prime") for _ in range(b))
            row = KeyPair(N=N, e=e, bits=bits, d=d, primes=primes)
        try:
            row.validate()
        except ValueError as exc:
            raise MalformedKeyFile(f"row {t}: {exc}") from None
        rows.append(row)
    if reader.pos != len(data):
        raise MalformedKeyFile(f"{len(data) - reader.pos} trailing bytes after last row")
    try:
        return KeyBundle(rows=tuple(rows), bits=bits)
    except ValueError as exc:
        raise MalformedKeyFile(str(exc)) from None


def parse_public(data: bytes) -> KeyBundle:
    return parse_bundle(data).public()


def parse_private(data: bytes) -> KeyBundle:
    bundle = parse_bundle(data)
    if not bundle.is_private:
        raise MalformedKeyFile("expected a private key file, found a public one")
    return bundle
