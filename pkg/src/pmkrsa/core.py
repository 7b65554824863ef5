"""The multi-key blinded RSA scheme.

A message is cut into cells of ``payload_bytes`` bytes, each prefixed with a
0x01 sentinel byte so no cell is ever 0. Cell t belongs to key row t mod i.
Every cell gets a fresh blind r drawn from [2, N) with gcd(r, N) = 1, and is
shipped as the pair::

    c_star = (m * r)**e mod N        c_r = r**e mod N

Decryption recovers r' = c_r**d and m * r = c_star**d, then multiplies by
the inverse of r'.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from pmkrsa.errors import (
    InvalidConfig,
    LayoutMismatch,
    NotInvertible,
    PMKRSAError,
    SentinelViolation,
    TaskFailed,
)
from pmkrsa.keystore import KeyBundle, KeyPair
from pmkrsa.modmath import mod_inv, mod_pow
from pmkrsa.parallel import ParallelConfig, par_map
from pmkrsa.primegen import RandomSource

SENTINEL = 0x01
MAX_BLIND_ATTEMPTS = 128


def default_payload_bytes(bits: int) -> int:
    """Payload so that sentinel + payload stays within bits / 2 bits."""
    return bits // 16 - 1


def max_payload_bytes(bits: int) -> int:
    """Largest payload whose cells stay below 2**(bits - 1) <= N."""
    return (bits - 1) // 8 - 1


@dataclass(frozen=True)
class Layout:
    bits: int
    rows: int
    k: int
    total_len: int


@dataclass(frozen=True)
class ChunkGrid:
    cells: tuple
    rows: int
    payload_bytes: int
    total_len: int

    @property
    def k(self) -> int:
        return len(self.cells)

    @property
    def cols(self) -> int:
        return -(-self.k // self.rows)

    def row_of(self, t: int) -> int:
        return t % self.rows


@dataclass(frozen=True)
class BlindMatrix:
    r_cells: tuple


@dataclass(frozen=True)
class CipherPack:
    c_star: tuple
    c_r: tuple
    layout: Layout


def _resolve_payload(bits, payload_bytes):
    if payload_bytes is None:
        payload_bytes = default_payload_bytes(bits)
    if payload_bytes < 1 or payload_bytes > max_payload_bytes(bits):
        raise InvalidConfig(
            f"payload of {payload_bytes} bytes does not fit a {bits}-bit modulus"
        )
    return payload_bytes


def chunk(message: bytes, bundle: KeyBundle, payload_bytes: int | None = None) -> ChunkGrid:
    payload_bytes = _resolve_payload(bundle.bits, payload_bytes)
    cells = tuple(
        int.from_bytes(bytes([SENTINEL]) + message[lo:lo + payload_bytes], "big")
        for lo in range(0, len(message), payload_bytes)
    )
    return ChunkGrid(
        cells=cells, rows=len(bundle.rows), payload_bytes=payload_bytes, total_len=len(message)
    )


def gen_blind(grid: ChunkGrid, bundle: KeyBundle, rng: RandomSource) -> BlindMatrix:
    r_cells = []
    for t in range(grid.k):
        N = bundle.rows[grid.row_of(t)].N
        for _ in range(MAX_BLIND_ATTEMPTS):
            r = rng.randrange(2, N)
            if math.gcd(r, N) == 1:
                break
        else:
            raise NotInvertible(f"no blind coprime to row {grid.row_of(t)} modulus found")
        r_cells.append(r)
    return BlindMatrix(r_cells=tuple(r_cells))


def encrypt_cell(m: int, r: int, key: KeyPair) -> tuple[int, int]:
    """(c_star, c_r) for one cell value m and blind r."""
    N = key.N
    return mod_pow((m * r) % N, key.e, N, key.ctx), mod_pow(r, key.e, N, key.ctx)


def decrypt_cell(c_star: int, c_r: int, key: KeyPair, use_crt: bool = True) -> int:
    N = key.N
    if c_star >= N or c_r >= N:
        raise LayoutMismatch("ciphertext cell is not below its row modulus")
    if use_crt and len(key.primes) >= 2:
        r_prime = key.private_op(c_r)
        blinded = key.private_op(c_star)
    else:
        r_prime = mod_pow(c_r, key.d, N, key.ctx)
        blinded = mod_pow(c_star, key.d, N, key.ctx)
    return (blinded * mod_inv(r_prime, N)) % N


def _unwrap(exc: TaskFailed):
    if isinstance(exc.cause, PMKRSAError):
        raise exc.cause from exc
    raise exc


def encrypt(message: bytes, bundle: KeyBundle, rng: RandomSource,
            config: ParallelConfig | None = None, payload_bytes: int | None = None,
            blinds: BlindMatrix | None = None) -> CipherPack:
    grid = chunk(message, bundle, payload_bytes)
    blinds = blinds or gen_blind(grid, bundle, rng)
    rows = bundle.rows
    try:
        pairs = par_map(
            grid.cells,
            lambda t, m: encrypt_cell(m, blinds.r_cells[t], rows[t % grid.rows]),
            config,
        )
    except TaskFailed as exc:
        _unwrap(exc)
    return CipherPack(
        c_star=tuple(p[0] for p in pairs),
        c_r=tuple(p[1] for p in pairs),
        layout=Layout(bits=bundle.bits, rows=grid.rows, k=grid.k, total_len=grid.total_len),
    )


def decrypt(pack: CipherPack, bundle: KeyBundle, config: ParallelConfig | None = None,
            use_crt: bool = True) -> bytes:
    layout = pack.layout
    if not bundle.is_private:
        raise InvalidConfig("decryption needs a private bundle")
    if layout.bits != bundle.bits or layout.rows != len(bundle.rows):
        raise LayoutMismatch(
            f"pack is {layout.bits} bits x {layout.rows} rows, "
            f"bundle is {bundle.bits} bits x {len(bundle.rows)} rows"
        )
    if not (layout.k == len(pack.c_star) == len(pack.c_r)):
        raise LayoutMismatch("cell count disagrees with layout")
    rows = bundle.rows
    try:
        cells = par_map(
            range(layout.k),
            lambda t, _: decrypt_cell(pack.c_star[t], pack.c_r[t], rows[t % layout.rows], use_crt),
            config,
        )
    except TaskFailed as exc:
        _unwrap(exc)

    out = bytearray()
    for t, m in enumerate(cells):
        raw = m.to_bytes((m.bit_length() + 7) // 8, "big")
        if not raw or raw[0] != SENTINEL:
            raise SentinelViolation(f"cell {t} lost its sentinel byte (corruption or wrong key)")
        out += raw[1:]
    if len(out) < layout.total_len:
        raise LayoutMismatch(f"recovered {len(out)} bytes, header promises {layout.total_len}")
    return bytes(out[:layout.total_len])
