import io
import json

import pytest
from hypothesis import given, settings, strategies as st

from safesip.errors import ParameterError, ReplaySourceError, RoutingError
from safesip.fabric import (INTEGRATOR, AdversaryHook, Fabric, MessageKind, Placement,
                            chiplet_endpoint, record_and_replay, send)

C0, C1 = chiplet_endpoint(0), chiplet_endpoint(1)


def fab(*hooks):
    f = Fabric()
    for ep in (INTEGRATOR, C0, C1):
        f.register(ep)
    for h in hooks:
        f.add_hook(h)
    return f


def resp(f, payload=b"\xaa\x55", src=C0):
    return f.message(src, INTEGRATOR, MessageKind.RESPONSE, payload)


def test_passive_identity():
    h = AdversaryHook.passive()
    f = fab(h)
    m = resp(f)
    d = send(f, m)
    assert d.delivered and d.message == m
    assert h.observed == [m]
    assert f.transcript[0].hook == "passive"


def test_tamper_flips_exactly_bit_zero():
    f = fab(AdversaryHook.tamper([0]))
    d = f.send(resp(f, b"\x00\x00"))
    assert d.message.payload == b"\x80\x00"


def test_tamper_ignores_other_kinds():
    f = fab(AdversaryHook.tamper([0]))
    d = f.post(INTEGRATOR, C0, MessageKind.CHALLENGE, b"\x00")
    assert d.message.payload == b"\x00" and d.entry.hook == "none"


def test_drop_is_recorded():
    f = fab(AdversaryHook.drop())
    d = f.send(resp(f))
    assert not d.delivered
    assert f.transcript[0].outcome == "dropped"
    with pytest.raises(ReplaySourceError):
        f.lookup(C0, INTEGRATOR, 0)


def test_drop_by_destination():
    f = fab(AdversaryHook.drop(dsts={C1}))
    assert f.post(INTEGRATOR, C0, "Control", b"x").delivered
    assert not f.post(INTEGRATOR, C1, "Control", b"x").delivered


def test_forge_and_mitm():
    f = fab(AdversaryHook.forge(b"\x01\x02"))
    assert f.send(resp(f)).message.payload == b"\x01\x02"
    f = fab(AdversaryHook.mitm(lambda p: p[::-1]))
    assert f.send(resp(f, b"\x01\x02")).message.payload == b"\x02\x01"


def test_replay_hook_substitutes_recorded_payload():
    f = fab()
    f.send(resp(f, b"old"))
    f.add_hook(AdversaryHook.replay(C0, INTEGRATOR, 0))
    d = f.send(resp(f, b"new"))
    assert d.message.payload == b"old" and d.message.seq == 1


def test_target_scoping():
    f = fab(AdversaryHook.tamper([0], target=1))
    assert f.send(resp(f, b"\x00", src=C0)).message.payload == b"\x00"
    assert f.send(resp(f, b"\x00", src=C1)).message.payload == b"\x80"


def test_hook_order_by_placement():
    f = fab()
    order = []
    for p in (Placement("integrator"), Placement("chiplet", 2), Placement("foundry"),
              Placement("chiplet", 0)):
        f.add_hook(AdversaryHook.mitm(lambda b, p=p: order.append(str(p)) or b,
                                      placement=p, name=str(p)))
    f.send(resp(f))
    assert order == ["foundry", "chiplet0", "chiplet2", "integrator"]
    assert f.transcript[0].hook == "foundry;chiplet0;chiplet2;integrator"


def test_bad_hooks():
    with pytest.raises(ParameterError):
        AdversaryHook("sniff")
    with pytest.raises(ParameterError):
        AdversaryHook("mitm")
    with pytest.raises(ParameterError):
        Placement("chiplet")


def test_routing_error():
    f = fab()
    with pytest.raises(RoutingError):
        f.post(INTEGRATOR, chiplet_endpoint(9), "Control", b"")
    assert f.transcript == []


def test_record_and_replay():
    f = fab()
    f.begin_session(b"s1")
    f.send(resp(f, b"hello"))
    copy = record_and_replay(f, (C0, INTEGRATOR), 0)
    assert copy.seq == 1 and copy.payload == b"hello"
    assert f.transcript[-1].hook == "replay;duplicate"
    f.begin_session(b"s2")
    record_and_replay(f, (C0, INTEGRATOR), 0)
    assert f.transcript[-1].hook == "replay"
    with pytest.raises(ReplaySourceError):
        record_and_replay(f, (C0, INTEGRATOR), 42)


def test_replay_bypasses_hooks():
    f = fab()
    f.send(resp(f, b"\x00"))
    f.add_hook(AdversaryHook.tamper([0]))
    assert record_and_replay(f, (C0, INTEGRATOR), 0).payload == b"\x00"


def test_duplicate_seq_flagged():
    f = fab()
    m = resp(f)
    f.send(m)
    f.send(m)
    assert f.transcript[1].hook == "duplicate-seq"


def test_clock_and_hop_delay():
    f = Fabric(hop_delay=3)
    f.register(INTEGRATOR)
    f.register(C0)
    e1 = f.post(INTEGRATOR, C0, "Challenge", b"").entry
    e2 = f.post(C0, INTEGRATOR, "Response", b"", at=100).entry
    assert (e1.ts_cycles, e2.ts_cycles) == (3, 103)
    with pytest.raises(ParameterError):
        Fabric(-1)


def test_jsonl_fields():
    f = fab(AdversaryHook.passive())
    f.send(resp(f, b"\xde\xad"))
    buf = io.StringIO()
    f.export_jsonl(buf)
    rec = json.loads(buf.getvalue().strip())
    assert list(rec) == ["ts_cycles", "src", "dst", "seq", "kind", "hook", "outcome",
                         "payload_hex"]
    assert rec["payload_hex"] == "dead" and rec["kind"] == "Response"


MODES = st.sampled_from(["tamper", "drop", "forge"])


def _hook(mode):
    return {"tamper": lambda: AdversaryHook.tamper([3]),
            "drop": lambda: AdversaryHook.drop(),
            "forge": lambda: AdversaryHook.forge(b"\xff")}[mode]()


@settings(max_examples=50)
@given(MODES, st.lists(st.binary(min_size=1, max_size=8), min_size=1, max_size=10))
def test_passive_composes_as_identity(mode, payloads):
    a, b = fab(_hook(mode)), fab(AdversaryHook.passive(), _hook(mode))
    for p in payloads:
        da, db = a.send(resp(a, p)), b.send(resp(b, p))
        assert (da.delivered, da.message) == (db.delivered, db.message)


@settings(max_examples=50)
@given(st.lists(st.tuples(st.sampled_from([C0, C1]), st.binary(max_size=4)), max_size=30))
def test_one_entry_per_send(sends):
    f = fab(AdversaryHook.drop(dsts={C1}))
    for dst, p in sends:
        f.post(INTEGRATOR, dst, "Control", p)
    assert len(f.transcript) == len(sends)
