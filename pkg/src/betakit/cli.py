"""``betakit`` command line: verify, table and sample.

Parameter syntax
----------------
``--params`` is a comma-separated list of parameter slots, one per identity
parameter.  A slot is a single value (``1/2``, ``3``, ``0.7``), an inclusive
range ``start:stop[:step]`` (``1/2:5:1/2``) or alternatives ``a|b|c``.  The
grid is the Cartesian product of the slots.  Integers and ``a/b`` literals
are exact rationals; anything with a decimal point or exponent is a float,
and floats are refused in exact mode.

``--n`` takes ``k``, ``a..b``, ``a:b[:step]`` or a comma list of those.

Config files
------------
Flat ``key = value`` lines; ``#`` starts a comment.  A line reading ``case``
opens a new block; keys before the first block are defaults for every
block.  Keys mirror the long flag names (``identity``, ``params``, ``n``,
``mode``, ``tol``, ``combination``, ``shapes``, ``samples``, ``seed``,
``z-max``, ``workers``).  Flags given on the command line override the file.

Exit status: 0 when every case passes, 1 when any fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import itertools
import math
import os
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .identities import (
    EXACT,
    IDENTITY_IDS,
    MODES,
    IdentityCase,
    IdentityError,
    verify_grid,
)
from .montecarlo import COMBINATIONS, DIFFERENCE, ExperimentConfig, MonteCarloError, estimate_moments
from .report import (
    FORMATS,
    SAMPLE_COLUMNS,
    VERIFY_COLUMNS,
    dump_json,
    render,
    render_param,
    render_value,
    rows_to_csv,
    rows_to_text,
    sample_entry,
    sample_report,
    summary_line,
    verification_report,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


# --------------------------------------------------------------------------
# literal and range parsing

_INT = re.compile(r"^[+-]?\d+$")
_FRAC = re.compile(r"^[+-]?\d+/\d+$")


def parse_number(token: str):
    """``"3"`` and ``"1/2"`` give a Fraction; decimal literals give a float."""
    tok = token.strip()
    if _INT.match(tok):
        return Fraction(int(tok))
    if _FRAC.match(tok):
        num, den = tok.split("/")
        if int(den) == 0:
            raise UsageError(f"zero denominator in {token!r}")
        return Fraction(int(num), int(den))
    try:
        value = float(tok)
    except ValueError:
        raise UsageError(f"not a number: {token!r}") from None
    if not math.isfinite(value):
        raise UsageError(f"not a finite number: {token!r}")
    return value


def parse_slot(text: str) -> list:
    text = text.strip()
    if not text:
        raise UsageError("empty parameter slot")
    if "|" in text:
        return [parse_number(t) for t in text.split("|")]
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise UsageError(f"range must be start:stop[:step], got {text!r}")
        start, stop = parse_number(parts[0]), parse_number(parts[1])
        step = parse_number(parts[2]) if len(parts) == 3 else Fraction(1)
        if not step > 0:
            raise UsageError(f"range step must be positive in {text!r}")
        if stop < start:
            raise UsageError(f"empty range {text!r}")
        if any(isinstance(v, float) for v in (start, stop, step)):
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [float(start) + i * float(step) for i in range(count)]
        out, v = [], start
        while v <= stop:
            out.append(v)
            v += step
        return out
    return [parse_number(text)]


def parse_params(text: str | None) -> list[list]:
    if text is None or not text.strip():
        return []
    return [parse_slot(s) for s in text.split(",")]


def parse_n(text: str) -> list[int]:
    out = []
    for item in str(text).split(","):
        item = item.strip()
        if ".." in item:
            a, b = item.split("..", 1)
            values = range(_int(a), _int(b) + 1)
        elif ":" in item:
            parts = [_int(p) for p in item.split(":")]
            if len(parts) not in (2, 3) or (len(parts) == 3 and parts[2] < 1):
                raise UsageError(f"bad n range {item!r}")
            values = range(parts[0], parts[1] + 1, parts[2] if len(parts) == 3 else 1)
        else:
            values = [_int(item)]
        out.extend(values)
    if not out:
        raise UsageError(f"empty n range {text!r}")
    return out


def _int(text: str) -> int:
    text = text.strip()
    if not _INT.match(text):
        raise UsageError(f"expected an integer, got {text!r}")
    return int(text)


# --------------------------------------------------------------------------
# config files


def parse_config(text: str) -> list[dict]:
    defaults: dict = {}
    blocks: list[dict] = []
    current = defaults
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "case":
            current = {}
            blocks.append(current)
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected 'key = value' or 'case'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise UsageError(f"config line {lineno}: missing key")
        current[key.replace("-", "_")] = value
    return [{**defaults, **b} for b in blocks] or [defaults]


def load_blocks(args, flag_keys: list[str]) -> list[dict]:
    blocks = [{}]
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                blocks = parse_config(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
    overrides = {k: getattr(args, k) for k in flag_keys if getattr(args, k, None) is not None}
    return [{**b, **{k: str(v) for k, v in overrides.items()}} for b in blocks]


def resolve_workers(value) -> int:
    raw = value if value is not None else os.environ.get("BETAKIT_WORKERS", "1")
    try:
        workers = int(raw)
    except (TypeError, ValueError):
        raise UsageError(f"workers must be a positive integer, got {raw!r}") from None
    if workers < 1:
        raise UsageError(f"workers must be a positive integer, got {raw!r}")
    return workers


# --------------------------------------------------------------------------
# grids


@dataclass
class GridSpec:
    identity_id: str
    param_slots: list = field(default_factory=list)
    n_values: list = field(default_factory=lambda: [0])
    mode: str = EXACT
    tol: float | None = None

    def __post_init__(self):
        if self.identity_id not in IDENTITY_IDS:
            raise UsageError(f"unknown identity {self.identity_id!r}; choose from {', '.join(IDENTITY_IDS)}")
        if self.mode not in MODES:
            raise UsageError(f"mode must be one of {MODES}, got {self.mode!r}")
        if any(len(slot) == 0 for slot in self.param_slots) or not self.n_values:
            raise UsageError("grid ranges must be non-empty")
        if self.mode == EXACT:
            for slot in self.param_slots:
                for v in slot:
                    if isinstance(v, float):
                        raise UsageError(
                            f"exact mode needs rational parameters; write {v!r} as a fraction")

    def cases(self) -> list[IdentityCase]:
        combos = list(itertools.product(*self.param_slots)) if self.param_slots else [()]
        return [IdentityCase(self.identity_id, tuple(ps), n, self.mode)
                for ps in combos for n in self.n_values]


def grids_from_block(block: dict) -> list[GridSpec]:
    ids = block.get("identity")
    if not ids:
        raise UsageError("no identity given (use --identity or an 'identity =' config key)")
    tol = block.get("tol")
    try:
        tol = float(tol) if tol is not None else None
    except ValueError:
        raise UsageError(f"bad tolerance {tol!r}") from None
    if tol is not None and not tol > 0:
        raise UsageError("tolerance must be positive")
    slots = parse_params(block.get("params"))
    n_values = parse_n(block.get("n", "0"))
    mode = block.get("mode", EXACT)
    return [GridSpec(i.strip(), slots, n_values, mode, tol) for i in ids.split(",")]


def _run_grids(grids: list[GridSpec], workers: int):
    results = []
    for grid in grids:
        results.extend(verify_grid(grid.cases(), grid.tol, workers))
    return results


# --------------------------------------------------------------------------
# commands


def _emit(text: str, output: str | None):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _timestamp(args) -> str | None:
    return args.timestamp or os.environ.get("SOURCE_DATE_EPOCH")


VERIFY_KEYS = ["identity", "params", "n", "mode", "tol"]


def cmd_verify(args) -> int:
    blocks = load_blocks(args, VERIFY_KEYS)
    grids = [g for b in blocks for g in grids_from_block(b)]
    results = _run_grids(grids, resolve_workers(args.workers))
    report = verification_report(results, _timestamp(args))
    _emit(render(report, args.format, VERIFY_COLUMNS), args.output)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def cmd_table(args) -> int:
    blocks = load_blocks(args, VERIFY_KEYS)
    grids = [g for b in blocks for g in grids_from_block(b)]
    results = _run_grids(grids, resolve_workers(args.workers))
    report = verification_report(results, _timestamp(args))
    ids = list(dict.fromkeys(r.case.identity_id for r in results))
    if args.format == "json":
        text = dump_json(report)
    elif len(ids) == 1:
        cols = ["n", "params", "lhs", "rhs", "discrepancy", "passed"]
        if any("condition_hint" in e for e in report["cases"]):
            cols.append("condition_hint")
        rows = [[e.get(c) for c in cols] for e in report["cases"]]
        text = rows_to_csv(cols, rows) if args.format == "csv" else rows_to_text(cols, rows)
    else:
        text = _side_by_side(results, ids, args.format)
    if args.format == "text":
        text += "\n\n" + summary_line(report["summary"])
    _emit(text, args.output)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def _side_by_side(results, ids, fmt) -> str:
    rows: dict = {}
    for r in results:
        key = (tuple(render_param(p) for p in r.case.params), r.case.n, r.mode)
        rows.setdefault(key, {})[r.case.identity_id] = r
    cols = ["params", "n"]
    for i in ids:
        cols += [f"{i}.lhs", f"{i}.rhs", f"{i}.discrepancy"]
    table = []
    for (params, n, mode), by_id in rows.items():
        row = [list(params), n]
        for i in ids:
            r = by_id.get(i)
            row += [render_value(r.lhs), render_value(r.rhs),
                    render_value(r.discrepancy)] if r else [None, None, None]
        table.append(row)
    return rows_to_csv(cols, table) if fmt == "csv" else rows_to_text(cols, table)


SAMPLE_KEYS = ["combination", "shapes", "n", "samples", "seed", "z_max", "workers"]


def experiments_from_block(block: dict, default_workers) -> list[tuple[ExperimentConfig, list[int], list[str]]]:
    combination = block.get("combination")
    if combination not in COMBINATIONS:
        raise UsageError(f"combination must be one of {COMBINATIONS}, got {combination!r}")
    if "seed" not in block:
        raise UsageError("an explicit --seed is required")
    seed = _int(block["seed"])
    labels = [s.strip() for s in block.get("shapes", "").split(",") if s.strip()]
    if not labels:
        raise UsageError("no shapes given")
    shapes = []
    for lab in labels:
        v = parse_number(lab)
        if not v > 0:
            raise UsageError(f"gamma shapes must be positive, got {lab}")
        shapes.append(float(v))
    if combination == DIFFERENCE and len(shapes) == 1:
        shapes, labels = shapes * 2, labels * 2
    orders = parse_n(block.get("n", "1"))
    samples = _int(block.get("samples", "1000000"))
    z_max = float(parse_number(block.get("z_max", "5")))
    workers = resolve_workers(block.get("workers", default_workers))
    config = ExperimentConfig(combination, tuple(shapes), orders[0], samples, seed,
                              z_threshold=z_max, workers=workers)
    return config, orders, labels


def cmd_sample(args) -> int:
    blocks = load_blocks(args, SAMPLE_KEYS)
    plans = [experiments_from_block(b, args.workers) for b in blocks]
    entries = []
    for config, orders, labels in plans:
        for est in estimate_moments(config, orders):
            entries.append(sample_entry(config, est, labels))
    report = sample_report(entries, _timestamp(args))
    _emit(render(report, args.format, SAMPLE_COLUMNS), args.output)
    return EXIT_OK if all(e["passed"] for e in entries) else EXIT_FAIL


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="betakit", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"betakit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value config file with repeatable 'case' blocks")
        p.add_argument("--format", choices=FORMATS, default="text")
        p.add_argument("--output", "-o", help="write the report here instead of stdout")
        p.add_argument("--workers", help="parallel workers (default: $BETAKIT_WORKERS or 1)")
        p.add_argument("--timestamp", help="timestamp recorded in the report")

    for name, helptext in (("verify", "check identities over a parameter grid"),
                           ("table", "tabulate both sides of identities per n")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--identity", help=f"comma list of: {', '.join(IDENTITY_IDS)}")
        p.add_argument("--params", help="comma-separated parameter slots, e.g. 1/2:5:1/2,1/2")
        p.add_argument("--n", help="n values: k, a..b, a:b:step or a comma list")
        p.add_argument("--mode", choices=MODES)
        p.add_argument("--tol", help="relative tolerance in float mode")
        common(p)

    p = sub.add_parser("sample", help="Monte Carlo moment check for sums/differences of gamma variates")
    p.add_argument("--combination", choices=COMBINATIONS)
    p.add_argument("--shapes", help="comma list of gamma shapes, e.g. 1/2,1,3/2")
    p.add_argument("--n", help="moment order(s)")
    p.add_argument("--samples", help="sample count N (default 1000000)")
    p.add_argument("--seed", help="unsigned 64-bit seed (required)")
    p.add_argument("--z-max", dest="z_max", help="|z| gate (default 5)")
    common(p)
    return parser


COMMANDS = {"verify": cmd_verify, "table": cmd_table, "sample": cmd_sample}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, IdentityError, MonteCarloError, ValueError) as exc:
        print(f"betakit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
