"""Human-readable digest of a finished run."""

import logging
import math
from pathlib import Path

import humanize
from dateutil import parser
from pydantic import ValidationError

from gclab.errors import InvalidInputError
from gclab.labcli.config import Task
from gclab.labcli.runner import RUN_RECORD, RunRecord

log = logging.getLogger(__name__)

GREEK = {"ALPHA": "α", "BETA": "β"}


def load_record(run_dir: str | Path) -> RunRecord:
    path = Path(run_dir) / RUN_RECORD
    if not path.is_file():
        raise InvalidInputError(f"no {RUN_RECORD} in {run_dir}")
    try:
        return RunRecord.model_validate_json(path.read_text())
    except (ValidationError, UnicodeDecodeError) as e:
        raise InvalidInputError(f"corrupt {RUN_RECORD} in {run_dir}: {e}") from e


def _exponent(value) -> str:
    if value is None:
        return "undefined"
    value = float(value)
    return "∞" if math.isinf(value) else f"{value:.4g}"


def _mixing_lines(summary: dict) -> list[str]:
    lines = []
    for kind, entry in summary.items():
        symbol = GREEK.get(kind, kind)
        for check in entry["thresholds"]:
            fitted = _exponent(check["fitted"])
            if check["flag"] == "super-polynomial":
                fitted += " (geometric)"
            elif check["flag"] == "vanishing":
                fitted += " (vanishes)"
            relation = "≥" if check["verdict"] == "SATISFIED" else "<" if check["verdict"] == "VIOLATED" else "?"
            outcome = {
                "SATISFIED": "rate hypotheses satisfied at scan scale",
                "VIOLATED": "rate hypotheses violated at scan scale",
                "INCONCLUSIVE": "inconclusive",
            }[check["verdict"]]
            lines.append(
                f"fitted {symbol}-decay a={fitted} {relation} required {float(check['required']):.4g} "
                f"for δ={float(check['delta']):.4g} → {outcome}"
            )
    return lines


def _ks_lines(summary: dict) -> list[str]:
    lines = [f"n={row['n']}: mean sup|F_n - F| = {float(row['mean']):.5f}" for row in summary["rows"]]
    fit = summary.get("fit")
    lines.append(f"fitted b={float(fit['b']):.4f} (R²={float(fit['r_squared']):.4f})" if fit else "no decay fit")
    if "dkw_passed" in summary:
        lines.append(f"DKW tail check: {'PASS' if summary['dkw_passed'] else 'FAIL'}")
    return lines


def _verdict_lines(summary: dict) -> list[str]:
    lines = [f"verdict: {summary['verdict']}" + (f" (failing: {', '.join(summary['failing'])})" if summary["failing"] else "")]
    for name, check in summary["checklist"].items():
        lines.append(f"({name}) {'PASS' if check['passed'] else 'FAIL'}: {check['evidence']}")
    lines.extend(summary.get("notes", []))
    return lines


def _gcip_lines(summary: dict) -> list[str]:
    return [
        f"c1_hat={float(summary['c1_hat']):.6g}, c2_hat={float(summary['c2_hat']):.6g}",
        f"first condition {summary['bounded_verdict']} (slope {summary['s1_slope']}), "
        f"second condition {summary['s2_verdict']} (slope {summary['s2_slope']})",
        f"implication first ⇒ second holds: {summary['implication_holds']}",
        *summary.get("notes", []),
    ]


def _generic_lines(summary: dict) -> list[str]:
    return [f"{key}: {value}" for key, value in summary.items()]


FORMATTERS = {
    Task.MIXING_PROFILE: _mixing_lines,
    Task.KS_STUDY: _ks_lines,
    Task.GC_VERDICT: _verdict_lines,
    Task.GCIP_SCAN: _gcip_lines,
}


def render(run_dir: str | Path) -> str:
    record = load_record(run_dir)
    try:
        elapsed = parser.isoparse(record.finished_at) - parser.isoparse(record.started_at)
        took = humanize.naturaldelta(elapsed)
    except ValueError:
        took = "unknown duration"
    header = [
        f"experiment {record.experiment_id}: {record.task} (gclab {record.tool_version}), took {took}",
        f"config digest {record.config_digest[:12]}, {len(record.manifest)} artifacts",
    ]
    formatter = FORMATTERS.get(record.task, _generic_lines)
    try:
        body = formatter(record.summary)
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidInputError(f"run record summary is incomplete: {e}") from e
    return "\n".join(header + body)
