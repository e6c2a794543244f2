"""A single chiplet: watermark source, test wrapper, boot state machine."""

import hashlib
import struct
from dataclasses import dataclass
from enum import Enum

from .bitstring import bits_from_digest, unpack_bits
from .errors import (CalibrationError, DisabledError, ParameterError,
                     ProtocolOrderError)
from .garble import (DeviceSecret, MAX_WIDTH, Signature, derive_encoding,
                     garble_signature)

# authentication latency in clock cycles, per security parameter
LATENCY_TABLE = {16: 96, 32: 160, 64: 192}
DEFAULT_WBR_BITS = 64


def latency_cycles(kappa, permissive=False):
    """Calibrated latency lookup; unknown kappa returns 0 only when ``permissive``."""
    try:
        return LATENCY_TABLE[kappa]
    except KeyError:
        if permissive:
            return 0
        raise CalibrationError(
            f"no latency calibration for kappa={kappa}; known: {sorted(LATENCY_TABLE)}"
        ) from None


def is_calibrated(kappa):
    return kappa in LATENCY_TABLE


@dataclass(frozen=True)
class ChipletIdentity:
    vendor_id: int
    chiplet_index: int
    secret: DeviceSecret

    def __post_init__(self):
        if not 0 <= self.vendor_id < 1 << 32:
            raise ParameterError("vendor_id must fit in 32 bits")
        if self.chiplet_index < 0:
            raise ParameterError("chiplet_index must be non-negative")


def generate_signature(identity, challenge, width):
    """Keyed watermark: first ``width`` bits of SHA-256 over identity and challenge."""
    if width < 1 or width > MAX_WIDTH:
        raise ParameterError(f"width must be in [1, {MAX_WIDTH}], got {width}")
    msg = (struct.pack(">II", identity.vendor_id, identity.chiplet_index)
           + identity.secret.seed + bytes(challenge))
    return Signature(bits_from_digest(hashlib.sha256(msg).digest(), width))


class Instruction(str, Enum):
    BYPASS = "Bypass"
    AUTH_INIT = "AuthInit"
    AUTH_SHIFT = "AuthShift"
    DISABLE = "Disable"


class Phase(str, Enum):
    IDLE = "Idle"
    CHALLENGED = "Challenged"
    RESPONDED = "Responded"
    VERIFIED = "Verified"
    DISABLED = "Disabled"


LEGAL_TRANSITIONS = {
    (Phase.IDLE, Phase.CHALLENGED),
    (Phase.CHALLENGED, Phase.RESPONDED),
    (Phase.RESPONDED, Phase.VERIFIED),
    (Phase.RESPONDED, Phase.DISABLED),
    (Phase.VERIFIED, Phase.CHALLENGED),
}


class DftWrapper:
    """Wrapper instruction register plus a fixed-length boundary register.

    The boundary register shifts toward index 0: new bits enter at the end and
    leave from index 0.
    """

    def __init__(self, wbr_bits=DEFAULT_WBR_BITS):
        if wbr_bits < 1:
            raise ParameterError("WBR must hold at least one bit")
        self.wir = Instruction.BYPASS
        self.wbr = [0] * wbr_bits

    def load_wir(self, instr):
        instr = Instruction(instr)
        self.wir = instr
        if instr is Instruction.AUTH_INIT:
            self.wbr = [0] * len(self.wbr)
        return self

    def shift_wbr(self, bits_in):
        if self.wir is not Instruction.AUTH_SHIFT:
            raise ProtocolOrderError(f"WBR shift needs AuthShift, WIR holds {self.wir.value}")
        out = []
        for b in bits_in:
            out.append(self.wbr.pop(0))
            self.wbr.append(int(b))
        return self, out


@dataclass(frozen=True)
class AuthResponse:
    chiplet_index: int
    garbled: object
    latency: int


class Chiplet:
    """Single-owner mutable chiplet model."""

    def __init__(self, identity, wbr_bits=DEFAULT_WBR_BITS, permissive_latency=False):
        self.identity = identity
        self.wrapper = DftWrapper(wbr_bits)
        self.phase = Phase.IDLE
        self.permissive_latency = permissive_latency
        self.history = [Phase.IDLE]

    @property
    def index(self):
        return self.identity.chiplet_index

    @property
    def disabled(self):
        return self.phase is Phase.DISABLED

    def _require_live(self, what):
        if self.phase is Phase.DISABLED:
            raise DisabledError(f"chiplet {self.index} is disabled; cannot {what}")

    def _move(self, new):
        if new is Phase.DISABLED:
            if self.phase is not Phase.DISABLED:
                self.phase = new
                self.history.append(new)
            return
        self._require_live(f"move to {new.value}")
        if (self.phase, new) not in LEGAL_TRANSITIONS:
            raise ProtocolOrderError(
                f"chiplet {self.index}: illegal transition {self.phase.value} -> {new.value}")
        self.phase = new
        self.history.append(new)

    def load_wir(self, instr):
        self._require_live("load WIR")
        self.wrapper.load_wir(instr)
        if self.wrapper.wir is Instruction.DISABLE:
            self.disable()
        return self

    def shift_wbr(self, bits_in):
        self._require_live("shift WBR")
        _, out = self.wrapper.shift_wbr(bits_in)
        return out

    def begin_auth(self):
        """Idle/Verified -> Challenged; a no-op if already Challenged."""
        self._require_live("accept a challenge")
        if self.phase is not Phase.CHALLENGED:
            self._move(Phase.CHALLENGED)

    def respond_auth(self, nonce, params, challenge):
        self._require_live("respond")
        if self.phase not in (Phase.IDLE, Phase.VERIFIED, Phase.CHALLENGED):
            raise ProtocolOrderError(
                f"chiplet {self.index} cannot respond from phase {self.phase.value}")
        lat = latency_cycles(params.kappa, permissive=self.permissive_latency)
        self.begin_auth()
        sig = generate_signature(self.identity, challenge, params.width)
        table = derive_encoding(self.identity.secret, nonce, params)
        self._move(Phase.RESPONDED)
        return AuthResponse(self.index, garble_signature(sig, table), lat)

    def handle_challenge(self, nonce, params, challenge):
        """Full wrapper sequence for one challenge: AuthInit, shift, respond."""
        self.load_wir(Instruction.AUTH_INIT)
        self.load_wir(Instruction.AUTH_SHIFT)
        self.shift_wbr(unpack_bits(challenge))
        return self.respond_auth(nonce, params, challenge)

    def mark_verified(self):
        self._move(Phase.VERIFIED)
        self.wrapper.load_wir(Instruction.BYPASS)

    def disable(self):
        self._move(Phase.DISABLED)
        self.wrapper.wir = Instruction.DISABLE
        return self


def respond_auth(chiplet, nonce, params, challenge):
    return chiplet.respond_auth(nonce, params, challenge)


def disable(chiplet):
    return chiplet.disable()
