"""Straight-line recomputation of a chiplet response digest.

Deliberately shares no code with the package: plain hashlib and integer bit
twiddling only. Used to check the end-to-end pipeline.
"""

import hashlib


def _first_bits(digest, n):
    v = int.from_bytes(digest, "big")
    return [(v >> (8 * len(digest) - 1 - j)) & 1 for j in range(n)]


def signature_bits(vendor_id, index, seed, challenge, width):
    msg = vendor_id.to_bytes(4, "big") + index.to_bytes(4, "big") + seed + challenge
    return _first_bits(hashlib.sha256(msg).digest(), width)


def wire_words(seed, nonce, wire, kappa):
    d0 = hashlib.sha256(seed + nonce + wire.to_bytes(4, "big") + b"\x00").digest()
    d1 = hashlib.sha256(seed + nonce + wire.to_bytes(4, "big") + b"\x01").digest()
    b0 = _first_bits(d0, kappa)
    r0 = b0[kappa - 1]
    w0 = [r0] + b0[:kappa - 1]
    w1 = [1 - r0] + _first_bits(d1, kappa - 1)
    return w0, w1


def garbled_bits(vendor_id, index, seed, nonce, challenge, width, kappa):
    sig = signature_bits(vendor_id, index, seed, challenge, width)
    out = []
    for i, b in enumerate(sig):
        w0, w1 = wire_words(seed, nonce, i, kappa)
        out.extend(w1 if b else w0)
    return out


def serialize(bits):
    n = len(bits)
    nbytes = (n + 7) // 8
    v = 0
    for b in bits:
        v = (v << 1) | b
    v <<= 8 * nbytes - n
    return n.to_bytes(4, "big") + (v.to_bytes(nbytes, "big") if nbytes else b"")


def response_digest(vendor_id, index, seed, nonce, challenge, width, kappa):
    bits = garbled_bits(vendor_id, index, seed, nonce, challenge, width, kappa)
    return hashlib.sha256(serialize(bits)).hexdigest()


def aggregate_hex(bit_lists):
    h = hashlib.sha256()
    for bits in bit_lists:
        h.update(serialize(bits))
    return h.hexdigest()
