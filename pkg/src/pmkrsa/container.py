"""The PMK1 ciphertext container.

Byte layout (big-endian)::

    offset  size  field
    0       4     magic "PMK1"
    4       1     version = 1
    5       4     bits
    9       2     rows
    11      4     k (cell count)
    15      8     total_len (plaintext bytes)
    23      ...   k records of c_star cell || c_r cell,
                  each cell exactly ceil(bits / 8) bytes, zero padded

The body must be exactly k * 2 * ceil(bits / 8) bytes.
"""
from __future__ import annotations

import struct

from pmkrsa.core import CipherPack, Layout
from pmkrsa.errors import (
    BadMagic,
    InvalidHeader,
    TrailingGarbage,
    TruncatedBody,
    UnsupportedVersion,
)

MAGIC = b"PMK1"
VERSION = 1
HEADER = struct.Struct(">4sBIHIQ")
HEADER_SIZE = HEADER.size


def cell_width(bits: int) -> int:
    return (bits + 7) // 8


def write_container(pack: CipherPack) -> bytes:
    layout = pack.layout
    width = cell_width(layout.bits)
    out = bytearray(HEADER.pack(MAGIC, VERSION, layout.bits, layout.rows, layout.k, layout.total_len))
    for c_star, c_r in zip(pack.c_star, pack.c_r):
        out += c_star.to_bytes(width, "big")
        out += c_r.to_bytes(width, "big")
    return bytes(out)


def parse_container(data: bytes) -> CipherPack:
    """Inverse of :func:`write_container`; raises a ContainerError subclass."""
    data = bytes(data)
    head = data[:4]
    if head != MAGIC[:len(head)]:
        raise BadMagic(f"expected {MAGIC!r}, found {head!r}", 0)
    if len(data) > 4 and data[4] != VERSION:
        raise UnsupportedVersion(f"container version {data[4]} (supported: {VERSION})", 4)
    if len(data) < HEADER_SIZE:
        raise TruncatedBody(f"header needs {HEADER_SIZE} bytes, got {len(data)}", len(data))
    _, _, bits, rows, k, total_len = HEADER.unpack_from(data)
    if bits == 0:
        raise InvalidHeader("bit length is zero", 5)
    if rows == 0:
        raise InvalidHeader("row count is zero", 9)

    width = cell_width(bits)
    expected = k * 2 * width
    body = len(data) - HEADER_SIZE
    if body < expected:
        raise TruncatedBody(f"body needs {expected} bytes for {k} records, got {body}", len(data))
    if body > expected:
        raise TrailingGarbage(f"{body - expected} bytes after the last record", HEADER_SIZE + expected)

    view = memoryview(data)
    c_star, c_r = [], []
    pos = HEADER_SIZE
    for _ in range(k):
        c_star.append(int.from_bytes(view[pos:pos + width], "big"))
        c_r.append(int.from_bytes(view[pos + width:pos + 2 * width], "big"))
        pos += 2 * width
    return CipherPack(
        c_star=tuple(c_star),
        c_r=tuple(c_r),
        layout=Layout(bits=bits, rows=rows, k=k, total_len=total_len),
    )
