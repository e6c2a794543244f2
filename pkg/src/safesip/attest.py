"""SHA-256 attestation, digest comparison and the write-once OTP store."""

import hashlib
import threading
from dataclasses import dataclass
from enum import Enum

from .errors import (CapacityError, ParameterError, UnprovisionedError,
                     WriteOnceViolation)

DEFAULT_OTP_SLOTS = 8


@dataclass(frozen=True)
class AttestationDigest:
    bytes: bytes

    def __post_init__(self):
        if len(self.bytes) != 32:
            raise ParameterError(f"digest must be 32 bytes, got {len(self.bytes)}")

    def hex(self):
        return self.bytes.hex()

    @classmethod
    def fromhex(cls, text):
        return cls(bytes.fromhex(text))

    def __str__(self):
        return self.hex()


class Outcome(str, Enum):
    PASS = "Pass"
    FAIL = "Fail"


@dataclass(frozen=True)
class EvalVerdict:
    outcome: Outcome
    detail: str = None

    @property
    def passed(self):
        return self.outcome is Outcome.PASS

    @classmethod
    def ok(cls):
        return cls(Outcome.PASS)

    @classmethod
    def fail(cls, detail):
        return cls(Outcome.FAIL, detail)


@dataclass(frozen=True)
class BaselineRecord:
    chiplet_id: int
    per_chiplet_digest: AttestationDigest
    nonce: object


def sha256(data=b""):
    return AttestationDigest(hashlib.sha256(bytes(data)).digest())


def aggregate_digest(garbled):
    """Hash of the serialized garbled signatures in list (chiplet-index) order."""
    garbled = list(garbled)
    if not garbled:
        raise ParameterError("cannot aggregate an empty list")
    h = hashlib.sha256()
    for g in garbled:
        h.update(g.serialize())
    return AttestationDigest(h.digest())


def evaluate(observed, expected):
    if observed.bytes == expected.bytes:
        return EvalVerdict.ok()
    diff = [i for i, (a, b) in enumerate(zip(observed.bytes, expected.bytes)) if a != b]
    return EvalVerdict.fail(
        f"digest mismatch in {len(diff)} of 32 bytes (first at byte {diff[0]})")


class OtpStore:
    """Write-once digest cells.

    Writes take a lock; reads of a written cell need none since it never changes.
    """

    def __init__(self, n_slots=DEFAULT_OTP_SLOTS):
        if n_slots < 0:
            raise ParameterError("slot count must be non-negative")
        self._cells = [None] * n_slots
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._cells)

    def _check_index(self, slot):
        if not isinstance(slot, int) or not 0 <= slot < len(self._cells):
            raise ParameterError(f"slot {slot!r} out of range for {len(self._cells)}-slot store")

    def is_written(self, slot):
        self._check_index(slot)
        return self._cells[slot] is not None

    def read(self, slot):
        self._check_index(slot)
        cell = self._cells[slot]
        if cell is None:
            raise UnprovisionedError(f"slot {slot} is blank")
        return cell

    def next_blank(self):
        for i, cell in enumerate(self._cells):
            if cell is None:
                return i
        raise CapacityError(f"all {len(self._cells)} OTP slots are written")

    def commit(self, slot, digest):
        self._check_index(slot)
        with self._lock:
            if self._cells[slot] is not None:
                raise WriteOnceViolation(f"slot {slot} already written")
            self._cells[slot] = digest
        return self

    def check(self, slot, digest):
        return evaluate(digest, self.read(slot))

    def written_slots(self):
        return [i for i, c in enumerate(self._cells) if c is not None]


def otp_commit(store, slot, digest):
    return store.commit(slot, digest)


def otp_check(store, slot, digest):
    return store.check(slot, digest)
