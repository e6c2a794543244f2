"""Run a configured campaign and write its report files."""

import csv
import io
import json
import os

from ..errors import ConfigError
from .campaigns import RUNNERS, CampaignResult
from .sweep import COMPLEXITY_COLUMNS, HD_COLUMNS, complexity_report, hd_sweep


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return v


def to_csv(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r[c]) for c in columns])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, int) and not isinstance(v, bool) and v.bit_length() > 53:
        # big integers as decimal strings so every JSON reader keeps them exact
        return str(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    return v


def to_json(obj):
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def run_campaign(cfg):
    """Execute the campaign in ``cfg`` and return its CampaignResult."""
    if cfg.campaign == "hd_sweep":
        report = hd_sweep(cfg.kappas, cfg.widths, cfg.trials, cfg.seed, cfg.stage)
        rows = [r.as_dict() for r in report.rows]
        return CampaignResult("hd_sweep", HD_COLUMNS, rows,
                              {"seed": cfg.seed, "trials": cfg.trials, "stage": cfg.stage})
    if cfg.campaign == "complexity":
        params = cfg.complexity or ([cfg.params] if cfg.params else [(64, 64)])
        rows = complexity_report(params)
        return CampaignResult("complexity", COMPLEXITY_COLUMNS, rows, {})
    return RUNNERS[cfg.campaign](cfg)


def render(result, fmt):
    if fmt == "csv":
        return to_csv(result.columns, result.rows)
    return to_json(result.to_dict())


def run_scenario(cfg):
    """Run the campaign and write the report plus any side files.

    Returns ``{name: path}`` of written files (or ``{name: text}`` when the
    config has no output path).
    """
    if cfg.campaign not in RUNNERS and cfg.campaign not in ("hd_sweep", "complexity"):
        raise ConfigError(f"unknown campaign {cfg.campaign!r}", "campaign")
    result = run_campaign(cfg)
    files = {"report": render(result, cfg.format)}
    for name, text in result.extras.items():
        files[name] = text
    if cfg.output is None:
        return files
    written = {}
    base = cfg.output
    for name, text in files.items():
        path = base if name == "report" else f"{os.path.splitext(base)[0]}.{name}"
        parent = os.path.dirname(os.path.abspath(path))
        os.makedirs(parent, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)
        written[name] = path
    return written
