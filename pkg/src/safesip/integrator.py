"""Trusted evaluator and secure-boot orchestration for a chiplet assembly.

Enrollment records one baseline digest per chiplet and escrows each device
secret with the evaluator, so expected digests can be recomputed for any
later boot nonce. A boot challenges every live chiplet over the fabric,
compares the digest of each received response with the recomputed one,
disables failing chiplets, and anchors the verified set in OTP: the first
boot commits the aggregate digest, later boots check against it. When the
verified set shrinks, the new aggregate is committed to the next blank slot.

The OTP anchor is the aggregate over the passing chiplets' responses after
decoding them and re-garbling under the enrollment nonce, so it stays stable
across boot nonces. It does depend on the challenge, which is therefore part
of the provisioned state of the assembly.
"""

import json
from dataclasses import dataclass, field

from .attest import (AttestationDigest, BaselineRecord, EvalVerdict, OtpStore,
                     aggregate_digest, evaluate, sha256)
from .chiplet import Chiplet, ChipletIdentity, generate_signature, is_calibrated
from .errors import (AlreadyEnrolledError, CapacityError, FreshnessError,
                     NotEnrolledError, ParameterError, ProtocolOrderError,
                     SafeSipError)
from .fabric import INTEGRATOR, Fabric, MessageKind, chiplet_endpoint
from .garble import (NONCE_BYTES, DeviceSecret, GarbledSignature, Nonce,
                     decode_signature, derive_encoding, garble_signature)


@dataclass
class SipAssembly:
    chiplets: list
    fabric: Fabric
    otp: OtpStore
    baselines: dict = field(default_factory=dict)
    escrow: dict = field(default_factory=dict)
    enrollment: tuple = None
    used_nonces: set = field(default_factory=set)
    anchor_slot: int = None
    anchor_members: frozenset = None
    boots: int = 0

    def __post_init__(self):
        idx = [c.index for c in self.chiplets]
        if idx != list(range(len(self.chiplets))):
            raise ParameterError(f"chiplet indices must be 0..N-1 in order, got {idx}")
        self.fabric.register(INTEGRATOR)
        for c in self.chiplets:
            self.fabric.register(chiplet_endpoint(c.index))

    @classmethod
    def build(cls, identities, otp_slots=8, hop_delay=0, wbr_bits=64,
              permissive_latency=True):
        chiplets = [Chiplet(i, wbr_bits=wbr_bits, permissive_latency=permissive_latency)
                    for i in identities]
        return cls(chiplets, Fabric(hop_delay), OtpStore(otp_slots))

    @classmethod
    def random(cls, n, rng, **kw):
        """Assembly of ``n`` chiplets with identities drawn from a numpy Generator."""
        ids = [ChipletIdentity(int(rng.integers(0, 1 << 32)), i, DeviceSecret(rng.bytes(32)))
               for i in range(n)]
        return cls.build(ids, **kw)

    def __len__(self):
        return len(self.chiplets)

    @property
    def enrolled(self):
        return self.enrollment is not None

    @property
    def disabled(self):
        return frozenset(c.index for c in self.chiplets if c.disabled)


@dataclass(frozen=True)
class ChipletResult:
    index: int
    verdict: EvalVerdict
    latency: int
    calibrated: bool
    observed: AttestationDigest = None


@dataclass(frozen=True)
class OtpAction:
    kind: str = "none"
    slot: int = None
    verdict: EvalVerdict = None

    def to_dict(self):
        return {
            "kind": self.kind,
            "slot": self.slot,
            "verdict": self.verdict.outcome.value if self.verdict else None,
        }


@dataclass(frozen=True)
class BootReport:
    nonce: Nonce
    per_chiplet: tuple
    aggregate: EvalVerdict
    otp_action: OtpAction
    disabled: frozenset
    boot_index: int = 0
    aggregate_digest: AttestationDigest = None
    mode: str = "boot"

    def verdict_of(self, index):
        for r in self.per_chiplet:
            if r.index == index:
                return r.verdict
        raise KeyError(index)

    @property
    def failed(self):
        return frozenset(r.index for r in self.per_chiplet if not r.verdict.passed)

    @property
    def passed(self):
        return frozenset(r.index for r in self.per_chiplet if r.verdict.passed)

    def to_dict(self):
        return {
            "boot_index": self.boot_index,
            "mode": self.mode,
            "nonce": self.nonce.hex(),
            "per_chiplet": [
                {
                    "index": r.index,
                    "verdict": r.verdict.outcome.value,
                    "detail": r.verdict.detail,
                    "latency_cycles": r.latency,
                    "calibrated": r.calibrated,
                    "observed_digest": r.observed.hex() if r.observed else None,
                }
                for r in self.per_chiplet
            ],
            "aggregate": self.aggregate.outcome.value,
            "aggregate_detail": self.aggregate.detail,
            "aggregate_digest": self.aggregate_digest.hex() if self.aggregate_digest else None,
            "otp_action": self.otp_action.to_dict(),
            "disabled": sorted(self.disabled),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def _as_nonce(n):
    if isinstance(n, Nonce):
        return n
    if isinstance(n, (bytes, bytearray)) and len(n) == NONCE_BYTES:
        return Nonce(bytes(n))
    raise ParameterError("nonce must be a Nonce or 16 bytes")


def expected_garbled(identity, params, nonce, challenge):
    """Vendor-side recomputation of a chiplet's correct response."""
    sig = generate_signature(identity, challenge, params.width)
    return garble_signature(sig, derive_encoding(identity.secret, nonce, params))


def enroll(sip, params, enrollment_nonce, challenge):
    """Record per-chiplet baseline digests and escrow device identities."""
    if sip.enrolled:
        raise AlreadyEnrolledError("assembly already enrolled")
    nonce = _as_nonce(enrollment_nonce)
    challenge = bytes(challenge)
    baselines = {}
    for c in sip.chiplets:
        g = expected_garbled(c.identity, params, nonce, challenge)
        baselines[c.index] = BaselineRecord(c.index, sha256(g.serialize()), nonce)
        sip.escrow[c.index] = c.identity
    sip.baselines = baselines
    sip.enrollment = (params, nonce, challenge)
    sip.used_nonces.add(nonce.value)
    return baselines


def _check_escrow(sip, params):
    _, enr_nonce, enr_challenge = sip.enrollment
    for idx, rec in sip.baselines.items():
        g = expected_garbled(sip.escrow[idx], params, enr_nonce, enr_challenge)
        if sha256(g.serialize()) != rec.per_chiplet_digest:
            raise SafeSipError(f"escrow for chiplet {idx} no longer matches its baseline")


def verify_response(sip, index, payload, params, nonce, challenge):
    """Evaluate one response payload for chiplet ``index`` under ``nonce``."""
    expected = sha256(expected_garbled(sip.escrow[index], params, _as_nonce(nonce),
                                       challenge).serialize())
    observed = sha256(payload)
    return evaluate(observed, expected), observed


def _anchor_garbled(sip, index, payload, params, nonce):
    identity = sip.escrow[index]
    received = GarbledSignature.deserialize(payload, params.kappa)
    sig = decode_signature(received, derive_encoding(identity.secret, nonce, params))
    _, enr_nonce, _ = sip.enrollment
    return garble_signature(sig, derive_encoding(identity.secret, enr_nonce, params))


def _run_boot(sip, params, boot_nonce, challenge, mode):
    if not sip.enrolled:
        raise NotEnrolledError("enroll the assembly before booting")
    nonce = _as_nonce(boot_nonce)
    challenge = bytes(challenge)
    if nonce.value in sip.used_nonces:
        raise FreshnessError(f"nonce {nonce.hex()} was already used by this assembly")
    if sip.anchor_slot is None and not any(not sip.otp.is_written(i) for i in range(len(sip.otp))):
        raise CapacityError("OTP store has no blank slot for the boot anchor")
    _check_escrow(sip, params)
    sip.used_nonces.add(nonce.value)

    fabric = sip.fabric
    fabric.begin_session(nonce.value)
    t0 = fabric.now
    challenge_payload = nonce.value + challenge
    received = {}
    lat = {}
    for c in sip.chiplets:
        if c.disabled:
            continue
        ep = chiplet_endpoint(c.index)
        ctl = fabric.post(INTEGRATOR, ep, MessageKind.CONTROL, b"AuthInit", at=t0)
        if ctl.delivered:
            c.load_wir("AuthInit")
        ch = fabric.post(INTEGRATOR, ep, MessageKind.CHALLENGE, challenge_payload, at=t0)
        if not ch.delivered:
            continue
        got = ch.message.payload
        resp = c.handle_challenge(_as_nonce(got[:NONCE_BYTES]) if len(got) >= NONCE_BYTES
                                  else nonce, params, got[NONCE_BYTES:])
        lat[c.index] = resp.latency
        back = fabric.post(ep, INTEGRATOR, MessageKind.RESPONSE, resp.garbled.serialize(),
                           at=ch.entry.ts_cycles + resp.latency)
        if back.delivered:
            received[c.index] = back.message.payload

    calibrated = is_calibrated(params.kappa)
    results = []
    passing = []
    for c in sip.chiplets:
        latency = lat.get(c.index, 0)
        if c.disabled:
            results.append(ChipletResult(c.index, EvalVerdict.fail("disabled"), 0, calibrated))
            continue
        if c.index not in received:
            verdict, observed = EvalVerdict.fail("no response"), None
        else:
            verdict, observed = verify_response(sip, c.index, received[c.index], params,
                                                nonce, challenge)
        results.append(ChipletResult(c.index, verdict, latency, calibrated, observed))
        if verdict.passed:
            c.mark_verified()
            passing.append(c.index)
        else:
            # disable immediately; power gating is outside the data fabric
            c.disable()
            fabric.post(INTEGRATOR, chiplet_endpoint(c.index), MessageKind.CONTROL, b"Disable")

    failed = [r.index for r in results if not r.verdict.passed]
    aggregate = EvalVerdict.ok() if not failed else EvalVerdict.fail(
        f"chiplets {failed} failed")

    agg = None
    otp_action = OtpAction()
    if passing:
        anchor = [_anchor_garbled(sip, i, received[i], params, nonce) for i in passing]
        agg = aggregate_digest(anchor)
        members = frozenset(passing)
        if sip.anchor_slot is not None and members == sip.anchor_members:
            otp_action = OtpAction("checked", sip.anchor_slot,
                                   sip.otp.check(sip.anchor_slot, agg))
        else:
            # first boot, or the verified set shrank since the last anchor
            try:
                slot = sip.otp.next_blank()
            except CapacityError as exc:
                otp_action = OtpAction("exhausted", None, EvalVerdict.fail(str(exc)))
            else:
                sip.otp.commit(slot, agg)
                sip.anchor_slot, sip.anchor_members = slot, members
                otp_action = OtpAction("committed", slot)

    report = BootReport(nonce, tuple(results), aggregate, otp_action, sip.disabled,
                        sip.boots, agg, mode)
    sip.boots += 1
    return report


def secure_boot(sip, params, boot_nonce, challenge):
    return _run_boot(sip, params, boot_nonce, challenge, "boot")


def reauthenticate(sip, params, nonce, challenge):
    if sip.boots == 0:
        raise ProtocolOrderError("reauthentication needs a prior secure boot")
    return _run_boot(sip, params, nonce, challenge, "reauth")
