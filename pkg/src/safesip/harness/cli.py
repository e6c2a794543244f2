"""Command-line entry point: ``safesip <subcommand> --config FILE``."""

import argparse
import sys

from ..errors import ConfigError
from .config import ATTACK_CAMPAIGNS, build_config, parse_text
from .scenario import run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

SUBCOMMANDS = {
    "enroll": "enroll",
    "boot": "boot",
    "attack": None,
    "sweep": "hd_sweep",
    "complexity": "complexity",
    "report": None,
}


def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def make_parser():
    parser = argparse.ArgumentParser(prog="safesip",
                                     description="Chiplet authentication simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "enroll": "compute and write per-chiplet baseline digests",
        "boot": "enroll and run secure boots under the configured adversary",
        "attack": "run the attack campaign named in the config",
        "sweep": "fault-injection Hamming-distance sweep",
        "complexity": "replay brute-force complexity table",
        "report": "run whatever campaign the config names",
    }
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", help="scenario config file")
        p.add_argument("--seed", type=_u64, help="override the config seed")
        p.add_argument("--out", help="report path (stdout if omitted)")
        p.add_argument("--format", choices=("csv", "json"))
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        text = ""
        if args.config:
            with open(args.config) as fh:
                text = fh.read()
        raw = parse_text(text)
        campaign = SUBCOMMANDS[args.command]
        if args.command == "attack":
            named = raw.get("campaign", (None,))[0]
            if named not in ATTACK_CAMPAIGNS:
                raise ConfigError(f"attack needs one of {', '.join(ATTACK_CAMPAIGNS)}",
                                  "campaign", raw.get("campaign", (None, None))[1])
        cfg = build_config(raw, campaign=campaign, seed=args.seed, output=args.out,
                           fmt=args.format)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        out = run_scenario(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if cfg.output is None:
        sys.stdout.write(out["report"])
    else:
        for path in out.values():
            print(path, file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
