import hashlib

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.stateful import RuleBasedStateMachine, invariant, rule

from safesip.attest import (AttestationDigest, OtpStore, Outcome, aggregate_digest,
                            evaluate, otp_check, otp_commit, sha256)
from safesip.bitstring import flip_bit, hamming
from safesip.errors import (CapacityError, ParameterError, UnprovisionedError,
                            WriteOnceViolation)
from safesip.garble import GarbledSignature

# FIPS 180-2 examples and NIST CAVP SHA256ShortMsg vectors (hex message -> digest)
KNOWN_ANSWERS = [
    ("", "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"),
    (b"abc".hex(), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"),
    (b"abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq".hex(),
     "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1"),
    (b"abcdefghbcdefghicdefghijdefghijkefghijklfghijklmghijklmnhijklmno"
     b"ijklmnopjklmnopqklmnopqrlmnopqrsmnopqrstnopqrstu".hex(),
     "cf5b16a778af8380036ce59e7b0492370b249b11e8f07a51afac45037afee9d1"),
    ("d3", "28969cdfa74a12c82f3bad960b0b000aca2ac329deea5c2328ebc6f2ba9802c1"),
    ("11af", "5ca7133fa735326081558ac312c620eeca9970d1e70a4b95533d956f072d1f98"),
    ("b4190e", "dff2e73091f6c05e528896c4c831b9448653dc2ff043528f6769437bc7b975c2"),
    ("74ba2521", "b16aa56be3880d18cd41e68384cf1ec8c17680c45a02b1575dc1518923ae8b0e"),
    ("c299209682", "f0887fe961c9cd3beab957e8222494abb969b1ce4c6557976df8b0f6d20e9166"),
    ("e1dc724d5621", "eca0a060b489636225b4fa64d267dabbe44273067ac679f20820bddc6b6a90ac"),
    ("06e076f5a442d5", "3fd877e27450e6bbd5d74bb82f9870c64c66e109418baa8e6bbcff355e287926"),
    ("5738c929c4f4ccb6", "963bb88f27f512777aab6c8b1a02c70ec0ad651d428f870036e1917120fb48bf"),
    ("3334c58075d3f4139e", "078da3d77ed43bd3037a433fd0341855023793f9afd08b4b08ea1e5597ceef20"),
]
MILLION_A = "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0"


@pytest.mark.parametrize("msg,digest", KNOWN_ANSWERS)
def test_sha256_known_answers(msg, digest):
    assert sha256(bytes.fromhex(msg)).hex() == digest


def test_sha256_million_a():
    assert sha256(b"a" * 1_000_000).hex() == MILLION_A


def test_sha256_deterministic_and_fixed_length():
    d = sha256(b"payload")
    assert d == sha256(b"payload")
    assert len(d.bytes) == 32 and len(d.hex()) == 64 and d.hex() == d.hex().lower()
    with pytest.raises(ParameterError):
        AttestationDigest(b"\x00" * 31)


def _random_garbled(rng, width=None, kappa=None):
    kappa = kappa or int(rng.integers(2, 9))
    width = width or int(rng.integers(1, 17))
    bits = tuple(int(b) for b in rng.integers(0, 2, width * kappa))
    return GarbledSignature.from_bits(bits, kappa)


def test_aggregate_single_element(rng):
    g = _random_garbled(rng)
    assert aggregate_digest([g]) == sha256(g.serialize())


def test_aggregate_empty():
    with pytest.raises(ParameterError):
        aggregate_digest([])


def test_aggregate_order_matters(rng):
    for _ in range(100):
        a, b = _random_garbled(rng, 8, 4), _random_garbled(rng, 8, 4)
        if a == b:
            continue
        assert aggregate_digest([a, b]) != aggregate_digest([b, a])


def test_aggregate_single_bit_flips(rng):
    for _ in range(1000):
        items = [_random_garbled(rng) for _ in range(int(rng.integers(1, 5)))]
        i = int(rng.integers(len(items)))
        bits = list(items[i].bits)
        bits[int(rng.integers(len(bits)))] ^= 1
        flipped = list(items)
        flipped[i] = GarbledSignature.from_bits(tuple(bits), items[i].kappa)
        oracle = hashlib.sha256(b"".join(g.serialize() for g in flipped)).digest()
        assert aggregate_digest(flipped).bytes == oracle
        assert aggregate_digest(flipped) != aggregate_digest(items)


def test_aggregate_mixed_widths(rng):
    items = [_random_garbled(rng, 3, 2), _random_garbled(rng, 64, 64), _random_garbled(rng, 1, 5)]
    assert len(aggregate_digest(items).bytes) == 32
    # framing: moving a word across the boundary changes the digest
    a = GarbledSignature.from_bits((1, 0, 1, 1), 2)
    b = GarbledSignature.from_bits((0, 1), 2)
    c = GarbledSignature.from_bits((1, 0), 2)
    d = GarbledSignature.from_bits((1, 1, 0, 1), 2)
    assert aggregate_digest([a, b]) != aggregate_digest([c, d])


def test_evaluate():
    d = sha256(b"x")
    assert evaluate(d, d).outcome is Outcome.PASS
    bad = AttestationDigest(d.bytes[:-1] + bytes([d.bytes[-1] ^ 1]))
    v = evaluate(d, bad)
    assert v.outcome is Outcome.FAIL and "byte 31" in v.detail


@given(st.binary(min_size=32, max_size=32), st.binary(min_size=32, max_size=32))
def test_evaluate_symmetric(a, b):
    da, db = AttestationDigest(a), AttestationDigest(b)
    assert evaluate(da, db).outcome == evaluate(db, da).outcome


def test_avalanche(rng):
    hds = []
    for _ in range(2000):
        data = rng.bytes(int(rng.integers(1, 200)))
        flipped = flip_bit(data, int(rng.integers(8 * len(data))))
        hds.append(hamming(sha256(data).bytes, sha256(flipped).bytes))
    assert abs(np.mean(hds) - 128) <= 5


class TestOtp:
    def test_commit_then_read(self):
        s = OtpStore(2)
        d = sha256(b"a")
        otp_commit(s, 0, d)
        assert s.read(0) == d and s.is_written(0)

    def test_write_once(self):
        s = OtpStore(2)
        d = sha256(b"a")
        s.commit(0, d)
        with pytest.raises(WriteOnceViolation):
            s.commit(0, sha256(b"b"))
        assert s.read(0) == d

    def test_bounds(self):
        s = OtpStore(3)
        with pytest.raises(ParameterError):
            s.commit(3, sha256(b""))
        with pytest.raises(ParameterError):
            s.read(-1)

    def test_check(self):
        s = OtpStore(2)
        d = sha256(b"a")
        s.commit(1, d)
        assert otp_check(s, 1, d).passed
        assert not otp_check(s, 1, sha256(b"b")).passed
        with pytest.raises(UnprovisionedError):
            otp_check(s, 0, d)

    def test_capacity(self):
        s = OtpStore(1)
        assert s.next_blank() == 0
        s.commit(0, sha256(b""))
        with pytest.raises(CapacityError):
            s.next_blank()
        assert len(OtpStore()) == 8


class OtpModel(RuleBasedStateMachine):
    """Random interleavings of commits and checks never change a written slot."""

    def __init__(self):
        super().__init__()
        self.store = OtpStore(4)
        self.model = {}

    @rule(slot=st.integers(0, 3), data=st.binary(max_size=8))
    def commit(self, slot, data):
        d = sha256(data)
        if slot in self.model:
            with pytest.raises(WriteOnceViolation):
                self.store.commit(slot, d)
        else:
            self.store.commit(slot, d)
            self.model[slot] = d

    @rule(slot=st.integers(0, 3), data=st.binary(max_size=8))
    def check(self, slot, data):
        d = sha256(data)
        if slot in self.model:
            assert self.store.check(slot, d).passed == (d == self.model[slot])
        else:
            with pytest.raises(UnprovisionedError):
                self.store.check(slot, d)

    @invariant()
    def contents_stable(self):
        for slot, d in self.model.items():
            assert self.store.read(slot) == d


TestOtpModel = OtpModel.TestCase
