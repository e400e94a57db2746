"""CSV and plain-text report writers."""

from __future__ import annotations

import csv
from dataclasses import astuple
from pathlib import Path
from typing import Sequence

from .metrics import FAILURE_COLUMNS, MetricsRow

# Columns that carry wall-clock measurements; excluded from golden comparisons.
WALL_CLOCK_COLUMNS = frozenset({"avg_wall_time_s", "wall_time_s", "combined_score"})


def _fmt(v: object) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _short(v: object) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.4g}" if abs(v) >= 1e-3 or v == 0 else f"{v:.3e}"
    return str(v)


def text_table(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    cells = [list(header)] + [[_short(v) for v in r] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[object]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def emit_report(
    rows: Sequence[MetricsRow],
    failures: Sequence[dict[str, object]],
    out_dir: str | Path,
    formats: Sequence[str] = ("csv", "txt"),
) -> list[Path]:
    """Write metrics and failure listings; returns the paths written."""
    if not rows:
        raise ValueError("no metrics rows to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = MetricsRow.columns()
    metric_rows = [astuple(r) for r in rows]
    fail_rows = [[f[c] for c in FAILURE_COLUMNS] for f in failures]
    written = []
    if "csv" in formats:
        write_csv(out / "metrics.csv", header, metric_rows)
        write_csv(out / "failures.csv", FAILURE_COLUMNS, fail_rows)
        written += [out / "metrics.csv", out / "failures.csv"]
    if "txt" in formats:
        parts = []
        for group in dict.fromkeys(r.group for r in rows):
            sub = [astuple(r) for r in rows if r.group == group]
            parts.append(f"[{group}]\n" + text_table(header, sub))
        (out / "metrics.txt").write_text("\n".join(parts))
        (out / "failures.txt").write_text(text_table(FAILURE_COLUMNS, fail_rows))
        written += [out / "metrics.txt", out / "failures.txt"]
    return written
