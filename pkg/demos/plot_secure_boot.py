"""
Secure boot of a four-chiplet assembly
======================================

Enroll an assembly, boot it cleanly, then boot again with a foundry trojan
flipping one bit of chiplet 2's response. Only chiplet 2 gets disabled, and
the OTP anchor moves to the next slot for the smaller verified set.
"""

import numpy as np

from safesip import AdversaryHook, SecurityParams, SipAssembly, enroll, reauthenticate, secure_boot

rng = np.random.default_rng(7)
params = SecurityParams(kappa=16, width=32)
sip = SipAssembly.random(4, rng)
challenge = rng.bytes(8)

baselines = enroll(sip, params, rng.bytes(16), challenge)
for idx, rec in baselines.items():
    print(f"chiplet {idx} baseline {rec.per_chiplet_digest.hex()[:16]}...")

# clean boot commits the anchor to slot 0
report = secure_boot(sip, params, rng.bytes(16), challenge)
print("boot 0:", report.aggregate.outcome.value, report.otp_action.to_dict())

# flip one bit in chiplet 2's response, past the 32-bit length prefix
sip.fabric.add_hook(AdversaryHook.tamper([32 + 5], target=2))
report = reauthenticate(sip, params, rng.bytes(16), challenge)
for r in report.per_chiplet:
    print(f"  chiplet {r.index}: {r.verdict.outcome.value:4} {r.verdict.detail or ''}")
print("boot 1:", report.aggregate.outcome.value, "disabled", sorted(report.disabled),
      report.otp_action.to_dict())

# with the trojan gone, the three survivors check against the new anchor
sip.fabric.clear_hooks()
report = reauthenticate(sip, params, rng.bytes(16), challenge)
print("boot 2:", [r.verdict.outcome.value for r in report.per_chiplet], report.otp_action.to_dict())

# last few transcript lines
for entry in sip.fabric.transcript[-4:]:
    print(entry.to_dict())
