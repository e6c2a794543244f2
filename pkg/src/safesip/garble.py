"""Per-bit signature garbling.

Each signature bit ``b`` on wire ``i`` becomes a kappa-bit word made of one
mask bit followed by kappa-1 label bits. The mask for value 1 is always the
complement of the mask for value 0, so the two words of a wire never collide.
Labels and masks are derived from a per-device secret and a per-boot nonce
with SHA-256 used as a PRF, which lets the vendor recompute expected outputs.
"""

import hashlib
import struct
from dataclasses import dataclass

from .bitstring import bits_from_digest, serialize_bits, deserialize_bits, to_str
from .errors import DimensionError, ParameterError, TamperDecodeError

SECRET_BYTES = 32
NONCE_BYTES = 16
# a single PRF output supplies kappa-1 label bits plus one mask bit
MAX_KAPPA = 256
MAX_WIDTH = 256


@dataclass(frozen=True)
class SecurityParams:
    kappa: int
    width: int

    def __post_init__(self):
        if not isinstance(self.kappa, int) or self.kappa < 2:
            raise ParameterError(f"kappa must be an integer >= 2, got {self.kappa!r}")
        if self.kappa > MAX_KAPPA:
            raise ParameterError(f"kappa must be <= {MAX_KAPPA}, got {self.kappa}")
        if not isinstance(self.width, int) or self.width < 1:
            raise ParameterError(f"width must be an integer >= 1, got {self.width!r}")

    def garbled_len(self):
        return self.width * self.kappa


@dataclass(frozen=True)
class Signature:
    """A W-bit watermark; ``bits[0]`` is the least-significant position."""

    bits: tuple

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if any(b not in (0, 1) for b in self.bits):
            raise ParameterError("signature bits must be 0 or 1")

    @property
    def width(self):
        return len(self.bits)

    @classmethod
    def from_int(cls, value, width):
        if value < 0 or value >= 1 << width:
            raise ParameterError(f"{value} does not fit in {width} bits")
        return cls(tuple((value >> i) & 1 for i in range(width)))

    def to_int(self):
        return sum(b << i for i, b in enumerate(self.bits))


@dataclass(frozen=True)
class DeviceSecret:
    seed: bytes

    def __post_init__(self):
        if len(self.seed) != SECRET_BYTES:
            raise ParameterError(f"device secret must be {SECRET_BYTES} bytes")

    def __repr__(self):
        return "DeviceSecret(<redacted>)"


@dataclass(frozen=True)
class Nonce:
    value: bytes

    def __post_init__(self):
        if len(self.value) != NONCE_BYTES:
            raise ParameterError(f"nonce must be {NONCE_BYTES} bytes")

    def hex(self):
        return self.value.hex()


@dataclass(frozen=True)
class WireEncoding:
    mask_zero: int
    label_zero: tuple
    label_one: tuple

    def __post_init__(self):
        if self.mask_zero not in (0, 1):
            raise ParameterError("mask bit must be 0 or 1")
        if len(self.label_zero) != len(self.label_one) or not self.label_zero:
            raise ParameterError("labels must be non-empty and of equal length")

    @property
    def mask_one(self):
        return 1 - self.mask_zero

    @property
    def kappa(self):
        return len(self.label_zero) + 1

    def word(self, bit):
        if bit:
            return (self.mask_one,) + tuple(self.label_one)
        return (self.mask_zero,) + tuple(self.label_zero)


@dataclass(frozen=True)
class EncodingTable:
    wires: tuple

    def __len__(self):
        return len(self.wires)

    @property
    def kappa(self):
        return self.wires[0].kappa


@dataclass(frozen=True)
class GarbledSignature:
    words: tuple

    @property
    def width(self):
        return len(self.words)

    @property
    def kappa(self):
        return len(self.words[0]) if self.words else 0

    @property
    def bits(self):
        return tuple(b for w in self.words for b in w)

    def __len__(self):
        return sum(len(w) for w in self.words)

    def serialize(self):
        return serialize_bits(self.bits)

    @classmethod
    def from_bits(cls, bits, kappa):
        if kappa < 2 or len(bits) % kappa:
            raise DimensionError(f"{len(bits)} bits do not split into {kappa}-bit words")
        return cls(tuple(tuple(bits[i:i + kappa]) for i in range(0, len(bits), kappa)))

    @classmethod
    def deserialize(cls, data, kappa):
        return cls.from_bits(deserialize_bits(data), kappa)

    def __str__(self):
        return to_str(self.bits)


def _prf(secret, nonce, wire, value):
    msg = secret.seed + nonce.value + struct.pack(">IB", wire, value)
    return hashlib.sha256(msg).digest()


def derive_encoding(secret, nonce, params):
    """Deterministic per-wire masks and labels for one (device, nonce) pair."""
    if not isinstance(params, SecurityParams):
        raise ParameterError("params must be SecurityParams")
    k = params.kappa
    wires = []
    for i in range(params.width):
        d0 = bits_from_digest(_prf(secret, nonce, i, 0), k)
        d1 = bits_from_digest(_prf(secret, nonce, i, 1), k - 1)
        wires.append(WireEncoding(mask_zero=d0[k - 1], label_zero=d0[:k - 1], label_one=d1))
    return EncodingTable(tuple(wires))


def garble_bit(bit, wire):
    return wire.word(bit)


def garble_signature(sig, table):
    if sig.width != len(table):
        raise DimensionError(
            f"signature has {sig.width} bits but encoding table has {len(table)} wires")
    return GarbledSignature(tuple(w.word(b) for b, w in zip(sig.bits, table.wires)))


def decode_word(word, wire):
    """Inverse of garble_bit for a known wire.

    A word equal to the other valid word decodes to that bit; only words that
    match neither raise.
    """
    word = tuple(word)
    if word == wire.word(0):
        return 0
    if word == wire.word(1):
        return 1
    raise TamperDecodeError(f"word {to_str(word)} matches neither encoding")


def decode_signature(garbled, table):
    if garbled.width != len(table):
        raise DimensionError(
            f"garbled signature has {garbled.width} words but table has {len(table)} wires")
    return Signature(tuple(decode_word(w, e) for w, e in zip(garbled.words, table.wires)))


def replay_complexity(params):
    """Brute-force replay cost g * 2**64 * 2**128, exact."""
    return params.garbled_len() << 192
