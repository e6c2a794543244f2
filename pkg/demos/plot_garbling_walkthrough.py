"""
Garbling a signature, step by step
==================================

A chiplet never puts its raw signature on the interposer. Each bit is swapped
for a kappa-bit word drawn from a per-boot encoding table, and only the
evaluator, who holds the same secret, can map the words back.
"""

import numpy as np

from safesip import (ChipletIdentity, DeviceSecret, Nonce, SecurityParams, decode_signature,
                     derive_encoding, garble_signature, generate_signature, sha256)

rng = np.random.default_rng(2024)
params = SecurityParams(kappa=8, width=8)
identity = ChipletIdentity(vendor_id=0x5AFE, chiplet_index=0, secret=DeviceSecret(rng.bytes(32)))

# the signature is a keyed function of the challenge
challenge = b"boot-challenge"
sig = generate_signature(identity, challenge, params.width)
print("signature bits   ", "".join(map(str, sig.bits)))

# a fresh nonce gives a fresh encoding table; word = mask bit + label bits
nonce = Nonce(rng.bytes(16))
table = derive_encoding(identity.secret, nonce, params)
for i, wire in enumerate(table.wires[:3]):
    print(f"wire {i}: zero ->", "".join(map(str, wire.word(0))),
          " one ->", "".join(map(str, wire.word(1))))

garbled = garble_signature(sig, table)
print("garbled length   ", len(garbled.bits), "bits =", params.width, "x", params.kappa)
print("response digest  ", sha256(garbled.serialize()).hex())

# the evaluator decodes with the same table
assert decode_signature(garbled, table) == sig

# a second boot with a new nonce sends an unrelated-looking response
again = garble_signature(sig, derive_encoding(identity.secret, Nonce(rng.bytes(16)), params))
diff = sum(a != b for a, b in zip(garbled.bits, again.bits))
print(f"bits differing across nonces: {diff} of {len(garbled.bits)}")
