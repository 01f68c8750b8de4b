"""Verification records, their CSV form and per-suite summaries.

Rows are written in sorted (suite, instance) order with floats at 12 significant digits,
so identical runs produce byte-identical files. ``runtime_ms`` stays blank unless timing
was requested.
"""
import math
from dataclasses import dataclass
from typing import IO, Iterable, List, Optional, Sequence

import agate

from fq.decomp.events import DecompLogger

logger = DecompLogger("Results")

CSV_COLUMNS = ("suite", "instance", "lhs", "rhs", "ratio", "pass", "runtime_ms")


@dataclass(frozen=True)
class VerificationRecord:
    suite: str
    instance: str
    lhs: float
    rhs: Optional[float]
    ratio: Optional[float]
    passed: bool
    hard: bool = False
    runtime_ms: Optional[float] = None


def record(
    suite: str,
    instance: str,
    lhs: float,
    rhs: Optional[float],
    passed: Optional[bool] = None,
    hard: bool = False,
) -> VerificationRecord:
    """Build a record with ratio = lhs / rhs (when rhs > 0).

    Hard checks carry an explicit ``passed``; report-only records always pass.
    """
    ratio = lhs / rhs if rhs is not None and rhs > 0 else None
    if passed is None:
        passed = True
    return VerificationRecord(suite, instance, float(lhs), None if rhs is None else float(rhs), ratio, bool(passed), hard)


def failures(records: Iterable[VerificationRecord]) -> List[VerificationRecord]:
    return [r for r in records if r.hard and not r.passed]


def sort_records(records: Iterable[VerificationRecord]) -> List[VerificationRecord]:
    return sorted(records, key=lambda r: (r.suite, r.instance))


def format_float(value: Optional[float]) -> str:
    if value is None:
        return ""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.12g}"


def to_table(records: Sequence[VerificationRecord], timing: bool = False) -> agate.Table:
    rows = [
        (
            r.suite,
            r.instance,
            format_float(r.lhs),
            format_float(r.rhs),
            format_float(r.ratio),
            "true" if r.passed else "false",
            format_float(r.runtime_ms) if timing else "",
        )
        for r in sort_records(records)
    ]
    text = agate.Text(cast_nulls=False)
    return agate.Table(rows, CSV_COLUMNS, [text] * len(CSV_COLUMNS))


def emit_csv(records: Sequence[VerificationRecord], path, timing: bool = False):
    """Write ``records`` as UTF-8 CSV to ``path`` (a filename or an open text stream)."""
    table = to_table(records, timing)
    if hasattr(path, "write"):
        table.to_csv(path, lineterminator="\n")
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            table.to_csv(fh, lineterminator="\n")
        logger.info(f"Wrote {len(records)} record(s) to {path}")


def _max_ratio(column) -> Optional[float]:
    values = [v for v in column.values_without_nulls()]
    return max(values) if values else None


def summarize(records: Sequence[VerificationRecord]) -> agate.Table:
    """One row per suite: record count, hard failures and the largest observed ratio."""
    rows = [(r.suite, r.hard, r.passed, r.ratio) for r in records]
    table = agate.Table(
        rows,
        ("suite", "hard", "passed", "ratio"),
        [agate.Text(), agate.Boolean(), agate.Boolean(), agate.Number()],
    )
    failed = table.compute([("failed", agate.Formula(agate.Boolean(), lambda row: row["hard"] and not row["passed"]))])
    return (
        failed.group_by("suite")
        .aggregate(
            [
                ("records", agate.Count()),
                ("hard_failures", agate.Count("failed", True)),
                ("max_ratio", agate.Summary("ratio", agate.Number(), _max_ratio)),
            ]
        )
        .order_by("suite")
    )


def print_summary(records: Sequence[VerificationRecord], output: Optional[IO[str]] = None):
    kwargs = {"output": output} if output is not None else {}
    summarize(records).print_table(max_rows=None, max_column_width=40, **kwargs)
