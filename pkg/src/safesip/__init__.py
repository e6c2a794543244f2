"""Chiplet authentication simulator: garbled signatures, SHA-256 attestation,
secure boot over a simulated interposer, and an adversary harness."""

from .attest import (AttestationDigest, BaselineRecord, EvalVerdict, OtpStore,
                     Outcome, aggregate_digest, evaluate, otp_check, otp_commit,
                     sha256)
from .chiplet import (AuthResponse, Chiplet, ChipletIdentity, DftWrapper,
                      Instruction, Phase, generate_signature, latency_cycles)
from .errors import *  # noqa: F401,F403
from .fabric import (AdversaryHook, Fabric, Message, MessageKind, Placement,
                     record_and_replay, send)
from .garble import (DeviceSecret, EncodingTable, GarbledSignature, Nonce,
                     SecurityParams, Signature, WireEncoding, decode_signature,
                     decode_word, derive_encoding, garble_bit, garble_signature,
                     replay_complexity)
from .integrator import (BootReport, SipAssembly, enroll, reauthenticate,
                         secure_boot, verify_response)

__version__ = "0.1.0"
