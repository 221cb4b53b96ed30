"""Rendering of verification and sampling results as text, CSV or JSON."""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction

from . import __version__
from .exactnum import SqrtPiValue
from .identities import EXACT, VerificationResult
from .montecarlo import ExperimentConfig, MomentEstimate

FORMATS = ("text", "csv", "json")


def render_param(p) -> str:
    if isinstance(p, float):
        return repr(p)
    return str(p)


def render_value(v):
    """Exact values become strings built from their rational parts; floats stay floats."""
    if isinstance(v, SqrtPiValue):
        return str(v)
    if isinstance(v, (int, Fraction)):
        return str(v)
    return v


def _json_float(x):
    if x is None:
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return x


def numeric_discrepancy(r: VerificationResult) -> float:
    if r.mode != EXACT:
        return r.discrepancy
    if r.discrepancy.is_zero():
        return 0.0
    scale = abs(float(r.rhs)) or 1.0
    return abs(float(r.discrepancy)) / scale


def case_entry(r: VerificationResult) -> dict:
    entry = {
        "id": r.case.identity_id,
        "params": [render_param(p) for p in r.case.params],
        "n": r.case.n,
        "mode": r.mode,
        "lhs": render_value(r.lhs),
        "rhs": render_value(r.rhs),
        "discrepancy": render_value(r.discrepancy) if r.mode == EXACT else r.discrepancy,
        "passed": r.passed,
    }
    if r.condition_hint is not None:
        entry["condition_hint"] = _json_float(r.condition_hint)
    if r.diagnostics:
        entry["diagnostics"] = {k: render_value(v) for k, v in r.diagnostics.items()}
    return entry


def verification_report(results: list[VerificationResult], timestamp: str | None = None) -> dict:
    report = {"version": __version__}
    if timestamp is not None:
        report["timestamp"] = timestamp
    report["cases"] = [case_entry(r) for r in results]
    report["summary"] = {
        "total": len(results),
        "passed": sum(r.passed for r in results),
        "worst_discrepancy": max((numeric_discrepancy(r) for r in results), default=0.0),
    }
    return report


def sample_entry(config: ExperimentConfig, est: MomentEstimate, shape_labels=None) -> dict:
    labels = shape_labels or [repr(s.shape) for s in config.shapes]
    return {
        "id": config.combination,
        "shapes": list(labels),
        "n": est.n,
        "samples": est.N,
        "seed": config.seed,
        "workers": config.workers,
        "estimate": est.estimate,
        "std_error": est.std_error,
        "closed_form": est.closed_form,
        "z_score": _json_float(est.z_score),
        "z_threshold": config.z_threshold,
        "passed": est.passed(config.z_threshold),
    }


def sample_report(entries: list[dict], timestamp: str | None = None) -> dict:
    report = {"version": __version__}
    if timestamp is not None:
        report["timestamp"] = timestamp
    report["cases"] = entries
    zs = [abs(e["z_score"]) if isinstance(e["z_score"], float) else math.inf for e in entries]
    report["summary"] = {
        "total": len(entries),
        "passed": sum(e["passed"] for e in entries),
        "worst_abs_z": _json_float(max(zs, default=0.0)),
    }
    return report


def dump_json(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False)


# --------------------------------------------------------------------------
# tables


def _cell(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "NO"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return ",".join(str(x) for x in v)
    if v is None:
        return ""
    return str(v)


def rows_to_text(columns: list[str], rows: list[list]) -> str:
    cells = [[_cell(v) for v in row] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for r in cells:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(lines)


def rows_to_csv(columns: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue().rstrip("\n")


def entries_table(entries: list[dict], columns: list[str]) -> list[list]:
    return [[e.get(c) for c in columns] for e in entries]


VERIFY_COLUMNS = ["id", "params", "n", "mode", "lhs", "rhs", "discrepancy", "passed", "condition_hint"]
SAMPLE_COLUMNS = ["id", "shapes", "n", "samples", "seed", "estimate", "std_error",
                  "closed_form", "z_score", "passed"]


def summary_line(summary: dict) -> str:
    parts = [f"{summary['passed']}/{summary['total']} passed"]
    if "worst_discrepancy" in summary:
        parts.append(f"worst discrepancy {summary['worst_discrepancy']!r}")
    if "worst_abs_z" in summary:
        parts.append(f"worst |z| {summary['worst_abs_z']!r}")
    return "; ".join(parts)


def render(report: dict, fmt: str, columns: list[str]) -> str:
    if fmt == "json":
        return dump_json(report)
    cols = [c for c in columns if any(c in e for e in report["cases"])] or columns
    rows = entries_table(report["cases"], cols)
    if fmt == "csv":
        return rows_to_csv(cols, rows)
    return rows_to_text(cols, rows) + "\n\n" + summary_line(report["summary"])
