from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from pmkrsa.container import HEADER_SIZE, cell_width, parse_container, write_container
from pmkrsa.core import CipherPack, Layout, decrypt, encrypt
from pmkrsa.errors import (
    BadMagic,
    ContainerError,
    InvalidHeader,
    TrailingGarbage,
    TruncatedBody,
    UnsupportedVersion,
)
from pmkrsa.primegen import Drbg

GOLDEN = Path(__file__).parent / "data" / "toy_cell.pmk1"
TOY_PACK = CipherPack(c_star=(3017,), c_r=(1752,), layout=Layout(bits=16, rows=1, k=1, total_len=1))


def test_header_size():
    assert HEADER_SIZE == 23
    assert cell_width(2048) == 256 and cell_width(12) == 2


def test_golden_bytes():
    golden = GOLDEN.read_bytes()
    assert write_container(TOY_PACK) == golden
    assert parse_container(golden) == TOY_PACK


def test_roundtrip_real(bundle_512x4):
    msg = Drbg(bytes(32)).randbytes(333)
    pack = encrypt(msg, bundle_512x4, Drbg(bytes(32)))
    blob = write_container(pack)
    assert len(blob) == HEADER_SIZE + pack.layout.k * 2 * 64
    assert decrypt(parse_container(blob), bundle_512x4) == msg


def test_empty_message(bundle_512x4):
    pack = encrypt(b"", bundle_512x4, Drbg(bytes(32)))
    blob = write_container(pack)
    assert len(blob) == HEADER_SIZE
    assert decrypt(parse_container(blob), bundle_512x4) == b""


@pytest.mark.parametrize("blob,exc,offset", [
    (b"", TruncatedBody, 0),
    (b"PM", TruncatedBody, 2),
    (b"PMX1", BadMagic, 0),
    (b"XXXX\x01", BadMagic, 0),
    (b"PMK1\x02" + bytes(18), UnsupportedVersion, 4),
    (b"PMK1\x01" + bytes(5), TruncatedBody, 10),
])
def test_header_errors(blob, exc, offset):
    with pytest.raises(exc) as info:
        parse_container(blob)
    assert info.value.offset == offset


def test_zero_fields():
    golden = GOLDEN.read_bytes()
    with pytest.raises(InvalidHeader) as info:
        parse_container(golden[:5] + bytes(4) + golden[9:])
    assert info.value.offset == 5
    with pytest.raises(InvalidHeader) as info:
        parse_container(golden[:9] + bytes(2) + golden[11:])
    assert info.value.offset == 9


def test_body_errors():
    golden = GOLDEN.read_bytes()
    with pytest.raises(TruncatedBody):
        parse_container(golden[:-1])
    with pytest.raises(TrailingGarbage) as info:
        parse_container(golden + b"\x00")
    assert info.value.offset == len(golden)


@settings(max_examples=2000)
@given(st.binary(max_size=64))
def test_fuzz_only_container_errors(blob):
    try:
        parse_container(blob)
    except ContainerError:
        pass


@settings(max_examples=500)
@given(st.binary(max_size=40))
def test_fuzz_with_valid_prefix(tail):
    try:
        pack = parse_container(b"PMK1\x01" + tail)
    except ContainerError:
        return
    assert write_container(pack) == b"PMK1\x01" + tail


@settings(max_examples=300)
@given(
    st.integers(1, 80),
    st.integers(1, 5),
    st.integers(0, 2**40),
    st.data(),
)
def test_write_parse_roundtrip(bits, rows, total_len, data):
    k = data.draw(st.integers(0, 6))
    cells = st.integers(0, 2**bits - 1)
    pack = CipherPack(
        c_star=tuple(data.draw(cells) for _ in range(k)),
        c_r=tuple(data.draw(cells) for _ in range(k)),
        layout=Layout(bits=bits, rows=rows, k=k, total_len=total_len),
    )
    assert parse_container(write_container(pack)) == pack
