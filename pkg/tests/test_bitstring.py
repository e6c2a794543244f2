import pytest
from hypothesis import given, strategies as st

from safesip.bitstring import (deserialize_bits, flip_bit, hamming, pack_bits,
                               serialize_bits, unpack_bits)
from safesip.errors import SerializationError


def test_pack_is_msb_first():
    assert pack_bits((1, 0, 0, 0, 0, 0, 0, 0)) == b"\x80"
    assert pack_bits((0, 0, 0, 0, 0, 0, 0, 1, 1)) == b"\x01\x80"


def test_serialize_layout():
    assert serialize_bits((1, 1, 0)) == b"\x00\x00\x00\x03\xc0"
    assert serialize_bits(()) == b"\x00\x00\x00\x00"


@given(st.lists(st.integers(0, 1), max_size=300))
def test_roundtrip(bits):
    assert deserialize_bits(serialize_bits(tuple(bits))) == tuple(bits)


@pytest.mark.parametrize("data", [
    b"\x00\x00",                     # short prefix
    b"\x00\x00\x00\x09\xff",         # body too short for 9 bits
    b"\x00\x00\x00\x03\xf0",         # non-zero padding
])
def test_deserialize_rejects(data):
    with pytest.raises(SerializationError):
        deserialize_bits(data)


def test_flip_and_hamming():
    data = b"\x00\x00"
    assert flip_bit(data, 0) == b"\x80\x00"
    assert flip_bit(data, 15) == b"\x00\x01"
    assert hamming(data, flip_bit(data, 9)) == 1
    assert hamming((0, 1, 1), (1, 1, 0)) == 2
    with pytest.raises(IndexError):
        flip_bit(data, 16)


def test_unpack_truncates():
    assert unpack_bits(b"\xa0", 3) == (1, 0, 1)
