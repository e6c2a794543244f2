"""Bit-string helpers and the length-prefixed wire format.

Bits are tuples of 0/1 ints. Packing is MSB-first within each byte and the
serialized form is a 32-bit big-endian bit count followed by the packed bytes.
"""

import struct

import numpy as np

from .errors import SerializationError

Bits = tuple


def pack_bits(bits):
    if len(bits) == 0:
        return b""
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()


def unpack_bits(data, nbits=None):
    """Unpack ``data`` MSB-first, optionally truncated to ``nbits``."""
    arr = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))
    if nbits is not None:
        if nbits > arr.size:
            raise SerializationError(f"need {nbits} bits, have {arr.size}")
        arr = arr[:nbits]
    return tuple(int(b) for b in arr)


def bits_from_digest(digest, nbits):
    """First ``nbits`` bits of a byte string, as a tuple."""
    if nbits > 8 * len(digest):
        raise SerializationError(f"need {nbits} bits, have {8 * len(digest)}")
    if nbits == 0:
        return ()
    s = format(int.from_bytes(digest, "big"), f"0{8 * len(digest)}b")
    return tuple(map(int, s[:nbits]))


def serialize_bits(bits):
    return struct.pack(">I", len(bits)) + pack_bits(bits)


def deserialize_bits(data):
    data = bytes(data)
    if len(data) < 4:
        raise SerializationError("truncated length prefix")
    (n,) = struct.unpack(">I", data[:4])
    body = data[4:]
    if len(body) != (n + 7) // 8:
        raise SerializationError(
            f"length prefix says {n} bits but body holds {len(body)} bytes")
    bits = unpack_bits(body)
    if any(bits[n:]):
        raise SerializationError("non-zero padding bits")
    return bits[:n]


def hamming(a, b):
    """Number of differing bits between two equal-length bit tuples or byte strings."""
    if isinstance(a, (bytes, bytearray)):
        if len(a) != len(b):
            raise ValueError("length mismatch")
        x = np.frombuffer(bytes(a), np.uint8) ^ np.frombuffer(bytes(b), np.uint8)
        return int(np.unpackbits(x).sum())
    if len(a) != len(b):
        raise ValueError("length mismatch")
    return sum(x != y for x, y in zip(a, b))


def flip_bit(data, position):
    """Return ``data`` (bytes) with bit ``position`` inverted, MSB-first indexing."""
    buf = bytearray(data)
    if not 0 <= position < 8 * len(buf):
        raise IndexError(f"bit {position} outside {8 * len(buf)}-bit payload")
    buf[position // 8] ^= 0x80 >> (position % 8)
    return bytes(buf)


def to_str(bits):
    return "".join(str(b) for b in bits)
