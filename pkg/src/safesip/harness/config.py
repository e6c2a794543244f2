"""Scenario configuration files.

The format is flat ``key = value`` lines::

    # comments run to end of line
    campaign   = boot
    width      = 8
    kappa      = 4
    n_chiplets = 4
    seed       = 1
    kappas     = [16, 32, 64]
    adversary  = [tamper(40)@foundry->2, passive]

Values are integers, ``true``/``false``, bare strings, or bracketed lists of
those separated by commas (commas inside parentheses do not split).

Adversary hook grammar::

    hook      := mode [ "(" args ")" ] [ "@" placement ] [ "->" target ]
    mode      := passive | tamper | drop | forge | mitm | replay
    placement := foundry | integrator | chiplet<k>
    target    := chiplet index the hook is scoped to

``tamper(p1 p2 ...)`` flips payload bit positions, ``drop(ep ...)`` drops
messages addressed to the listed endpoints (all if empty), ``forge(hex)``
replaces the payload, ``mitm(xor:hex)`` or ``mitm(invert)`` rewrites it,
``replay(src dst seq)`` substitutes a recorded payload.
"""

import re
from dataclasses import dataclass, field

from ..errors import ConfigError, SafeSipError
from ..fabric import AdversaryHook, MessageKind, Placement
from ..garble import SecurityParams

CAMPAIGNS = ("boot", "enroll", "tamper_exhaustive", "hd_sweep", "replay", "dos",
             "forge", "removal_probe", "complexity")
ATTACK_CAMPAIGNS = ("tamper_exhaustive", "replay", "dos", "forge", "removal_probe")
SIP_CAMPAIGNS = ("boot", "enroll") + ATTACK_CAMPAIGNS
FAULT_STAGES = ("signature", "encoding-label", "garbled-word", "digest-input")
FORMATS = ("csv", "json")

INT_KEYS = {"width", "kappa", "n_chiplets", "seed", "boots", "trials", "replays", "runs",
            "drop_chiplet", "forgeries", "observations", "otp_slots", "hop_delay"}
INT_LIST_KEYS = {"kappas", "widths"}
STR_KEYS = {"campaign", "output", "format", "stage", "challenge"}
STR_LIST_KEYS = {"adversary", "complexity"}
BOOL_KEYS = {"permissive_latency"}
KNOWN_KEYS = INT_KEYS | INT_LIST_KEYS | STR_KEYS | STR_LIST_KEYS | BOOL_KEYS

U64 = 1 << 64


@dataclass
class ScenarioConfig:
    campaign: str
    seed: int = 0
    params: SecurityParams = None
    n_chiplets: int = None
    adversary: list = field(default_factory=list)
    output: str = None
    format: str = "json"
    boots: int = 1
    trials: int = 1000
    kappas: list = None
    widths: list = None
    stage: str = "garbled-word"
    replays: int = 100
    runs: int = 50
    drop_chiplet: int = None
    forgeries: int = 100
    observations: int = 10000
    otp_slots: int = 8
    hop_delay: int = 0
    challenge: bytes = None
    permissive_latency: bool = True
    complexity: list = None

    def hooks(self):
        """Fresh hook objects; hooks carry state so each run builds its own."""
        return [parse_hook(spec) for spec in self.adversary]


def _split_top(text):
    items, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            items.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail or items:
        items.append(tail)
    return items


def _parse_int(text, key, line):
    try:
        return int(text, 0)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}", key, line) from None


def parse_text(text):
    """Parse config text into a raw ``{key: (value, line)}`` mapping."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not re.fullmatch(r"[a-z_][a-z0-9_]*", key):
            raise ConfigError("malformed key", key, lineno)
        if key not in KNOWN_KEYS:
            raise ConfigError("unknown key", key, lineno)
        if key in raw:
            raise ConfigError("duplicate key", key, lineno)
        if key in INT_LIST_KEYS | STR_LIST_KEYS:
            if not (value.startswith("[") and value.endswith("]")):
                raise ConfigError("expected a bracketed list", key, lineno)
            items = _split_top(value[1:-1])
            if any(i == "" for i in items):
                raise ConfigError("empty list item", key, lineno)
            if key in INT_LIST_KEYS:
                items = [_parse_int(i, key, lineno) for i in items]
            raw[key] = (items, lineno)
        elif key in INT_KEYS:
            raw[key] = (_parse_int(value, key, lineno), lineno)
        elif key in BOOL_KEYS:
            if value.lower() not in ("true", "false"):
                raise ConfigError("expected true or false", key, lineno)
            raw[key] = (value.lower() == "true", lineno)
        else:
            if not value:
                raise ConfigError("empty value", key, lineno)
            raw[key] = (value, lineno)
    return raw


_HOOK_RE = re.compile(
    r"^(?P<mode>[a-z]+)(?:\((?P<args>[^)]*)\))?(?:@(?P<place>[a-z0-9]+))?(?:->(?P<target>\d+))?$")


def _placement(text):
    if text is None or text == "foundry":
        return Placement("foundry")
    if text == "integrator":
        return Placement("integrator")
    m = re.fullmatch(r"chiplet(\d+)", text)
    if m:
        return Placement("chiplet", int(m.group(1)))
    raise ValueError(f"unknown placement {text!r}")


def _mitm_rule(arg):
    if arg == "invert":
        return lambda p: bytes(b ^ 0xFF for b in p)
    if arg.startswith("xor:"):
        mask = bytes.fromhex(arg[4:])
        if not mask:
            raise ValueError("empty xor mask")
        return lambda p: bytes(b ^ mask[i % len(mask)] for i, b in enumerate(p))
    raise ValueError(f"unknown mitm rule {arg!r}")


def parse_hook(spec):
    """Build an AdversaryHook from one hook spec string."""
    m = _HOOK_RE.match(spec.strip())
    if not m:
        raise ValueError(f"malformed hook spec {spec!r}")
    mode = m.group("mode")
    args = (m.group("args") or "").split()
    kw = {"placement": _placement(m.group("place")), "name": mode}
    if m.group("target") is not None:
        kw["target"] = int(m.group("target"))
    if mode == "passive":
        return AdversaryHook.passive(**kw)
    if mode == "tamper":
        if not args:
            raise ValueError("tamper needs at least one bit position")
        return AdversaryHook.tamper([int(a) for a in args], **kw)
    if mode == "drop":
        return AdversaryHook.drop(args or None, **kw)
    if mode == "forge":
        if len(args) != 1:
            raise ValueError("forge needs one hex payload")
        return AdversaryHook.forge(bytes.fromhex(args[0]), **kw)
    if mode == "mitm":
        if len(args) != 1:
            raise ValueError("mitm needs one rule")
        return AdversaryHook.mitm(_mitm_rule(args[0]), **kw)
    if mode == "replay":
        if len(args) != 3:
            raise ValueError("replay needs 'src dst seq'")
        return AdversaryHook.replay(args[0], args[1], int(args[2]),
                                    kinds=frozenset({MessageKind.RESPONSE}), **kw)
    raise ValueError(f"unknown hook mode {mode!r}")


def _require(raw, key, campaign):
    if key not in raw:
        raise ConfigError(f"required for campaign '{campaign}' but missing", key)
    return raw[key][0]


def build_config(raw, campaign=None, seed=None, output=None, fmt=None):
    """Validate a raw mapping into a ScenarioConfig; CLI overrides win."""
    val = {k: v for k, (v, _) in raw.items()}
    line = {k: ln for k, (_, ln) in raw.items()}

    campaign = campaign or val.get("campaign")
    if campaign is None:
        raise ConfigError("missing", "campaign")
    if campaign not in CAMPAIGNS:
        raise ConfigError(f"unknown campaign {campaign!r}; choose from {', '.join(CAMPAIGNS)}",
                          "campaign", line.get("campaign"))
    cfg = ScenarioConfig(campaign=campaign)

    if seed is None:
        seed = val.get("seed", 0)
    if not 0 <= seed < U64:
        raise ConfigError("seed must be an unsigned 64-bit integer", "seed", line.get("seed"))
    cfg.seed = seed

    if campaign in SIP_CAMPAIGNS:
        for key in ("width", "kappa", "n_chiplets"):
            _require(raw, key, campaign)
    if "width" in val or "kappa" in val:
        if "width" not in val or "kappa" not in val:
            missing = "kappa" if "width" in val else "width"
            raise ConfigError("width and kappa must be given together", missing)
        try:
            cfg.params = SecurityParams(val["kappa"], val["width"])
        except SafeSipError as exc:
            raise ConfigError(str(exc), "kappa", line["kappa"]) from None
    if "n_chiplets" in val:
        if val["n_chiplets"] < 1:
            raise ConfigError("must be >= 1", "n_chiplets", line["n_chiplets"])
        cfg.n_chiplets = val["n_chiplets"]

    for key in ("boots", "trials", "replays", "runs", "forgeries", "observations",
                "otp_slots", "hop_delay"):
        if key in val:
            if val[key] < 0 or (val[key] == 0 and key not in ("hop_delay", "otp_slots")):
                raise ConfigError("must be positive", key, line[key])
            setattr(cfg, key, val[key])
    if "drop_chiplet" in val:
        if cfg.n_chiplets is not None and not 0 <= val["drop_chiplet"] < cfg.n_chiplets:
            raise ConfigError("outside 0..n_chiplets-1", "drop_chiplet", line["drop_chiplet"])
        cfg.drop_chiplet = val["drop_chiplet"]

    for key in ("kappas", "widths"):
        if key in val:
            setattr(cfg, key, val[key])
    if campaign == "hd_sweep":
        cfg.kappas = cfg.kappas or ([cfg.params.kappa] if cfg.params else None)
        cfg.widths = cfg.widths or ([cfg.params.width] if cfg.params else None)
        for key in ("kappas", "widths"):
            if not getattr(cfg, key):
                raise ConfigError("required for campaign 'hd_sweep' but missing", key)
        try:
            for k in cfg.kappas:
                for w in cfg.widths:
                    SecurityParams(k, w)
        except SafeSipError as exc:
            raise ConfigError(str(exc), "kappas", line.get("kappas")) from None

    if "stage" in val:
        if val["stage"] not in FAULT_STAGES + ("all",):
            raise ConfigError(f"stage must be one of {', '.join(FAULT_STAGES)} or all",
                              "stage", line["stage"])
        cfg.stage = val["stage"]

    if "challenge" in val:
        try:
            cfg.challenge = bytes.fromhex(val["challenge"])
        except ValueError:
            raise ConfigError("challenge must be hex", "challenge", line["challenge"]) from None

    if "permissive_latency" in val:
        cfg.permissive_latency = val["permissive_latency"]

    if "adversary" in val:
        for spec in val["adversary"]:
            try:
                parse_hook(spec)
            except (ValueError, SafeSipError) as exc:
                raise ConfigError(str(exc), "adversary", line["adversary"]) from None
        cfg.adversary = list(val["adversary"])

    if "complexity" in val:
        pairs = []
        for item in val["complexity"]:
            m = re.fullmatch(r"(\d+)x(\d+)", item)
            if not m:
                raise ConfigError(f"expected WIDTHxKAPPA, got {item!r}",
                                  "complexity", line["complexity"])
            try:
                pairs.append(SecurityParams(int(m.group(2)), int(m.group(1))))
            except SafeSipError as exc:
                raise ConfigError(str(exc), "complexity", line["complexity"]) from None
        cfg.complexity = pairs

    out = output if output is not None else val.get("output")
    cfg.output = out
    fmt = fmt or val.get("format", "json")
    if fmt not in FORMATS:
        raise ConfigError("format must be csv or json", "format", line.get("format"))
    cfg.format = fmt
    return cfg


def load_config(path, **overrides):
    with open(path) as fh:
        text = fh.read()
    return build_config(parse_text(text), **overrides)


def loads_config(text, **overrides):
    return build_config(parse_text(text), **overrides)
