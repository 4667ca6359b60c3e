"""
Summary tables over exported runs.

`report` walks a directory for run manifests, reloads their metrics and writes
mean/std across seeds per (scheme, n_uavs, n_gus), overall and per slot.
"""

import csv
import logging
from pathlib import Path
from typing import List, Sequence, Union

from ..core.errors import ExportError
from .export import MANIFEST_FILE, load_run
from .runner import AggregateRow, MetricsRecord, aggregate

logger = logging.getLogger(__name__)

SUMMARY_FILE = "summary.csv"
PER_SLOT_FILE = "summary_per_slot.csv"
SUMMARY_HEADER = ("scheme", "n_uavs", "n_gus", "slot", "metric", "mean", "std", "n_seeds")


def find_runs(root: Union[str, Path]) -> List[Path]:
    root = Path(root)
    return sorted(p.parent for p in root.rglob(MANIFEST_FILE))


def write_summary(path: Union[str, Path], rows: Sequence[AggregateRow]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(SUMMARY_HEADER)
            for row in rows:
                writer.writerow([
                    row.scheme, row.n_uavs, row.n_gus, "" if row.slot is None else row.slot,
                    row.metric, repr(row.mean), repr(row.std), row.n_seeds,
                ])
    except OSError as e:
        raise ExportError(f"Cannot write {path}: {e}")
    return path


def report(root: Union[str, Path], out_dir: Union[str, Path, None] = None) -> Path:
    """Aggregate every run under `root`; returns the path of the overall summary."""
    runs = find_runs(root)
    if not runs:
        raise ExportError(f"No exported runs under {root}")
    records: List[MetricsRecord] = []
    for run_dir in runs:
        records.extend(load_run(run_dir).records)

    out_dir = Path(out_dir) if out_dir is not None else Path(root)
    summary = write_summary(out_dir / SUMMARY_FILE, aggregate(records, per_slot=False))
    write_summary(out_dir / PER_SLOT_FILE, aggregate(records, per_slot=True))
    logger.info(f"Summarized {len(runs)} runs ({len(records)} records) into {summary}")
    return summary
