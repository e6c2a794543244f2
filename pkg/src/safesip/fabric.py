"""Simulated interposer: ordered message delivery with adversary hooks.

All sends serialize through one total order. Hooks run in placement order
(interposer foundry, then malicious chiplets by index, then integrator) and
each may pass, rewrite or drop a message. Every send leaves exactly one
transcript entry.
"""

import json
import threading
from dataclasses import dataclass, field, replace
from enum import Enum

from .bitstring import flip_bit
from .errors import ParameterError, ReplaySourceError, RoutingError

INTEGRATOR = "integrator"


def chiplet_endpoint(index):
    return f"chiplet-{index}"


def endpoint_index(endpoint):
    if endpoint.startswith("chiplet-"):
        return int(endpoint.split("-", 1)[1])
    return None


class MessageKind(str, Enum):
    CHALLENGE = "Challenge"
    RESPONSE = "Response"
    CONTROL = "Control"


@dataclass(frozen=True)
class Message:
    src: str
    dst: str
    seq: int
    payload: bytes
    kind: MessageKind

    @property
    def channel(self):
        return (self.src, self.dst)


@dataclass(frozen=True)
class Placement:
    kind: str = "foundry"
    index: int = None

    def __post_init__(self):
        if self.kind not in ("foundry", "chiplet", "integrator"):
            raise ParameterError(f"unknown placement {self.kind!r}")
        if self.kind == "chiplet" and self.index is None:
            raise ParameterError("malicious-chiplet placement needs an index")

    def order_key(self):
        rank = {"foundry": 0, "chiplet": 1, "integrator": 2}[self.kind]
        return (rank, self.index if self.index is not None else -1)

    def __str__(self):
        if self.kind == "chiplet":
            return f"chiplet{self.index}"
        return self.kind


FOUNDRY = Placement("foundry")

_RESPONSE_ONLY = frozenset({MessageKind.RESPONSE})


@dataclass(eq=False)
class AdversaryHook:
    """One adversary behaviour on the fabric.

    ``target`` restricts the hook to traffic to or from one chiplet index;
    ``kinds`` restricts it to message kinds (None = all).
    """

    mode: str
    placement: Placement = FOUNDRY
    target: int = None
    kinds: frozenset = None
    positions: tuple = ()
    dsts: frozenset = None
    payload: bytes = None
    replay_of: tuple = None
    rewrite: object = None
    name: str = None
    observed: list = field(default_factory=list)

    MODES = ("passive", "tamper", "replay", "drop", "forge", "mitm")

    def __post_init__(self):
        if self.mode not in self.MODES:
            raise ParameterError(f"unknown hook mode {self.mode!r}")
        if self.mode == "mitm" and not callable(self.rewrite):
            raise ParameterError("mitm hook needs a callable rewrite rule")
        if self.mode == "forge" and self.payload is None:
            raise ParameterError("forge hook needs a payload")
        if self.mode == "replay" and self.replay_of is None:
            raise ParameterError("replay hook needs (src, dst, seq) of the recorded message")
        if self.name is None:
            self.name = self.mode

    @classmethod
    def passive(cls, **kw):
        return cls("passive", **kw)

    @classmethod
    def tamper(cls, positions, kinds=_RESPONSE_ONLY, **kw):
        return cls("tamper", positions=tuple(positions), kinds=kinds, **kw)

    @classmethod
    def drop(cls, dsts=None, **kw):
        return cls("drop", dsts=frozenset(dsts) if dsts is not None else None, **kw)

    @classmethod
    def forge(cls, payload, kinds=_RESPONSE_ONLY, **kw):
        return cls("forge", payload=bytes(payload), kinds=kinds, **kw)

    @classmethod
    def replay(cls, src, dst, seq, kinds=_RESPONSE_ONLY, **kw):
        return cls("replay", replay_of=(src, dst, seq), kinds=kinds, **kw)

    @classmethod
    def mitm(cls, rewrite, kinds=_RESPONSE_ONLY, **kw):
        return cls("mitm", rewrite=rewrite, kinds=kinds, **kw)

    def matches(self, msg):
        if self.kinds is not None and msg.kind not in self.kinds:
            return False
        if self.target is not None:
            ep = chiplet_endpoint(self.target)
            if ep not in (msg.src, msg.dst):
                return False
        return True

    def apply(self, msg, fabric):
        """Return the (possibly rewritten) message, or None to drop it."""
        if self.mode == "passive":
            self.observed.append(msg)
            return msg
        if self.mode == "tamper":
            payload = msg.payload
            for p in self.positions:
                if p < 8 * len(payload):
                    payload = flip_bit(payload, p)
            return replace(msg, payload=payload)
        if self.mode == "drop":
            if self.dsts is None or msg.dst in self.dsts:
                return None
            return msg
        if self.mode == "forge":
            return replace(msg, payload=self.payload)
        if self.mode == "replay":
            recorded = fabric.lookup(*self.replay_of)
            return replace(msg, payload=recorded.payload)
        return replace(msg, payload=bytes(self.rewrite(msg.payload)))


@dataclass(frozen=True)
class TranscriptEntry:
    ts_cycles: int
    message: Message
    hook: str
    delivered: bool

    @property
    def outcome(self):
        return "delivered" if self.delivered else "dropped"

    def to_dict(self):
        m = self.message
        return {
            "ts_cycles": self.ts_cycles,
            "src": m.src,
            "dst": m.dst,
            "seq": m.seq,
            "kind": m.kind.value,
            "hook": self.hook,
            "outcome": self.outcome,
            "payload_hex": m.payload.hex(),
        }


@dataclass(frozen=True)
class Delivery:
    delivered: bool
    message: Message
    entry: TranscriptEntry


class Fabric:
    """Flat star interposer with a logical cycle clock."""

    def __init__(self, hop_delay=0):
        if hop_delay < 0:
            raise ParameterError("hop delay must be non-negative")
        self.hop_delay = hop_delay
        self.now = 0
        self.endpoints = set()
        self.hooks = []
        self.transcript = []
        self._last_seq = {}
        self._delivered = {}
        self._session_payloads = {}
        self.session = None
        self._lock = threading.Lock()

    def register(self, endpoint):
        self.endpoints.add(endpoint)

    def add_hook(self, hook):
        self.hooks.append(hook)
        # stable sort keeps insertion order within a placement
        self.hooks.sort(key=lambda h: h.placement.order_key())
        return hook

    def clear_hooks(self):
        self.hooks.clear()

    def begin_session(self, tag):
        """Start a new freshness epoch (one per boot nonce)."""
        self.session = tag
        self._session_payloads = {}

    def next_seq(self, src, dst):
        return self._last_seq.get((src, dst), -1) + 1

    def message(self, src, dst, kind, payload):
        return Message(src, dst, self.next_seq(src, dst), bytes(payload), MessageKind(kind))

    def _check_route(self, msg):
        for ep in (msg.src, msg.dst):
            if ep not in self.endpoints:
                raise RoutingError(f"endpoint {ep!r} is not registered")

    def _record(self, msg, hook_names, delivered, at, flags=()):
        ts = self.now + self.hop_delay if at is None else at + self.hop_delay
        self.now = max(self.now, ts)
        label = ";".join(list(hook_names) + list(flags)) or "none"
        entry = TranscriptEntry(ts, msg, label, delivered)
        self.transcript.append(entry)
        prev = self._last_seq.get(msg.channel, -1)
        self._last_seq[msg.channel] = max(prev, msg.seq)
        if delivered:
            self._delivered[(msg.src, msg.dst, msg.seq)] = msg
            self._session_payloads.setdefault(msg.channel, set()).add(msg.payload)
        return entry

    def send(self, msg, at=None):
        """Route ``msg`` through every matching hook and log the outcome.

        ``at`` is the cycle the sender emits the message; delivery happens one
        hop later.
        """
        with self._lock:
            self._check_route(msg)
            flags = []
            if msg.seq <= self._last_seq.get(msg.channel, -1):
                flags.append("duplicate-seq")
            current = msg
            applied = []
            for hook in self.hooks:
                if not hook.matches(current):
                    continue
                out = hook.apply(current, self)
                applied.append(hook.name)
                if out is None:
                    entry = self._record(current, applied, False, at, flags)
                    return Delivery(False, current, entry)
                current = out
            entry = self._record(current, applied, True, at, flags)
            return Delivery(True, current, entry)

    def post(self, src, dst, kind, payload, at=None):
        return self.send(self.message(src, dst, kind, payload), at=at)

    def lookup(self, src, dst, seq):
        try:
            return self._delivered[(src, dst, seq)]
        except KeyError:
            raise ReplaySourceError(
                f"no delivered message {src}->{dst} seq {seq} in transcript") from None

    def record_and_replay(self, channel, seq, at=None):
        """Re-inject a recorded delivered message with a fresh sequence number.

        Hooks are bypassed. The entry is labelled ``replay`` and additionally
        ``duplicate`` when the same payload already crossed this channel in the
        current session.
        """
        src, dst = channel
        with self._lock:
            original = self.lookup(src, dst, seq)
            copy = replace(original, seq=self.next_seq(src, dst))
            flags = ["replay"]
            if original.payload in self._session_payloads.get(channel, ()):
                flags.append("duplicate")
            self._record(copy, [], True, at, flags)
        return copy

    def export_jsonl(self, path_or_file):
        lines = [json.dumps(e.to_dict(), sort_keys=False) for e in self.transcript]
        text = "\n".join(lines) + ("\n" if lines else "")
        if hasattr(path_or_file, "write"):
            path_or_file.write(text)
        else:
            with open(path_or_file, "w", newline="\n") as fh:
                fh.write(text)
        return text


def send(fabric, msg, at=None):
    return fabric.send(msg, at=at)


def record_and_replay(fabric, channel, seq, at=None):
    return fabric.record_and_replay(channel, seq, at=at)
