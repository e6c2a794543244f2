"""Fault-injection Hamming-distance sweeps and replay-complexity tables."""

import math
from dataclasses import dataclass

import numpy as np

from ..attest import sha256
from ..bitstring import flip_bit, hamming
from ..errors import ParameterError, StatisticalFloorError
from ..garble import (DeviceSecret, Nonce, SecurityParams, Signature, WireEncoding,
                      EncodingTable, derive_encoding, garble_signature,
                      replay_complexity)
from .config import FAULT_STAGES

MIN_TRIALS = 100

HD_COLUMNS = ("kappa", "width", "stage", "trials", "mean_hd_garbled_pct",
              "mean_hd_digest_pct", "max_hd_garbled_pct", "max_hd_digest_pct")
COMPLEXITY_COLUMNS = ("width", "kappa", "g", "tc", "log2_tc")


@dataclass(frozen=True)
class HdRow:
    kappa: int
    width: int
    stage: str
    trials: int
    mean_hd_garbled_pct: float
    mean_hd_digest_pct: float
    max_hd_garbled_pct: float
    max_hd_digest_pct: float

    def as_dict(self):
        return {c: getattr(self, c) for c in HD_COLUMNS}


@dataclass(frozen=True)
class HdReport:
    rows: tuple

    def row(self, kappa, width, stage="garbled-word"):
        for r in self.rows:
            if (r.kappa, r.width, r.stage) == (kappa, width, stage):
                return r
        raise KeyError((kappa, width, stage))


def _flip_encoding(table, sig, rng):
    """Corrupt one bit of the encoding entry a signature bit actually reads.

    Position 0 is the shared mask bit (the one-mask is derived from it), the
    rest index the label selected by the signature bit on that wire.
    """
    wires = list(table.wires)
    i = int(rng.integers(len(wires)))
    w = wires[i]
    pos = int(rng.integers(w.kappa))
    if pos == 0:
        wires[i] = WireEncoding(1 - w.mask_zero, w.label_zero, w.label_one)
    elif sig.bits[i]:
        label = list(w.label_one)
        label[pos - 1] ^= 1
        wires[i] = WireEncoding(w.mask_zero, w.label_zero, tuple(label))
    else:
        label = list(w.label_zero)
        label[pos - 1] ^= 1
        wires[i] = WireEncoding(w.mask_zero, tuple(label), w.label_one)
    return EncodingTable(tuple(wires))


def fault_trial(params, stage, rng):
    """One correct pipeline run plus one injected single-bit fault.

    Returns (garbled HD bits, digest HD bits).
    """
    secret = DeviceSecret(rng.bytes(32))
    nonce = Nonce(rng.bytes(16))
    sig = Signature(tuple(int(b) for b in rng.integers(0, 2, params.width)))
    table = derive_encoding(secret, nonce, params)
    good = garble_signature(sig, table)
    good_stream = good.serialize()
    good_digest = sha256(good_stream)

    if stage == "signature":
        bits = list(sig.bits)
        bits[int(rng.integers(params.width))] ^= 1
        bad_stream = garble_signature(Signature(tuple(bits)), table).serialize()
    elif stage == "encoding-label":
        bad_stream = garble_signature(sig, _flip_encoding(table, sig, rng)).serialize()
    elif stage == "garbled-word":
        bad_stream = flip_bit(good_stream, 32 + int(rng.integers(params.garbled_len())))
    elif stage == "digest-input":
        bad_stream = flip_bit(good_stream, int(rng.integers(8 * len(good_stream))))
    else:
        raise ParameterError(f"unknown fault stage {stage!r}")

    hd_g = hamming(good_stream[4:], bad_stream[4:])
    hd_d = hamming(good_digest.bytes, sha256(bad_stream).bytes)
    return hd_g, hd_d


def hd_cell(kappa, width, trials, seed, stage="garbled-word"):
    if trials < MIN_TRIALS:
        raise StatisticalFloorError(f"need at least {MIN_TRIALS} trials, got {trials}")
    params = SecurityParams(kappa, width)
    # each cell owns its generator so rows do not depend on sweep order
    rng = np.random.default_rng([seed, kappa, width, FAULT_STAGES.index(stage)])
    hd = np.array([fault_trial(params, stage, rng) for _ in range(trials)], dtype=float)
    g_pct = 100.0 * hd[:, 0] / params.garbled_len()
    d_pct = 100.0 * hd[:, 1] / 256
    return HdRow(kappa, width, stage, trials,
                 float(g_pct.mean()), float(d_pct.mean()),
                 float(g_pct.max()), float(d_pct.max()))


def hd_sweep(kappas, widths, trials, seed, stage="garbled-word"):
    """Mean/max HD of garbled output and digest under single-bit faults, per (kappa, width)."""
    if trials < MIN_TRIALS:
        raise StatisticalFloorError(f"need at least {MIN_TRIALS} trials, got {trials}")
    stages = FAULT_STAGES if stage == "all" else (stage,)
    rows = [hd_cell(k, w, trials, seed, s)
            for k in sorted(set(kappas)) for w in sorted(set(widths)) for s in stages]
    return HdReport(tuple(rows))


def complexity_report(params_list):
    """Rows of (width, kappa, g, TC, log2 TC), ascending by log2 TC."""
    rows = []
    for p in params_list:
        if not isinstance(p, SecurityParams):
            w, k = p
            p = SecurityParams(k, w)
        tc = replay_complexity(p)
        g = p.garbled_len()
        # exact when g is a power of two
        log2_tc = 192 + g.bit_length() - 1 if g & (g - 1) == 0 else math.log2(tc)
        rows.append({"width": p.width, "kappa": p.kappa, "g": g, "tc": tc,
                     "log2_tc": log2_tc})
    rows.sort(key=lambda r: (r["log2_tc"], r["width"], r["kappa"]))
    return rows
