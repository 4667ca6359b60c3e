"""
Run artifacts on disk.

    metrics.csv        scheme,seed,slot,metric,value   (one row per metric)
    traces.jsonl       one UAV-slot trace record per line
    layouts.jsonl      per (scheme, seed): GU positions, serving UAV of each GU,
                       UAV start positions
    reward_curve.csv   episode,mean_reward
    manifest.json      config, seeds, config hash and a content hash per file

Floats are written with repr() so a parse returns the identical values. The
manifest holds no timestamps; two exports of the same run are byte-identical.
"""

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from ..core.config import SimConfig
from ..core.fingerprint import git_blob_hash
from ..core.errors import DomainError, ExportError
from ..ppo.checkpoint import read_reward_curve, write_reward_curve
from .runner import MetricsRecord, record_metrics

logger = logging.getLogger(__name__)

MANIFEST_FORMAT_VERSION = 1
METRICS_FILE = "metrics.csv"
TRACES_FILE = "traces.jsonl"
LAYOUTS_FILE = "layouts.jsonl"
REWARD_CURVE_FILE = "reward_curve.csv"
MANIFEST_FILE = "manifest.json"
METRICS_HEADER = ("scheme", "seed", "slot", "metric", "value")


@dataclass
class LoadedRun:
    records: List[MetricsRecord]
    traces: List[Dict[str, Any]]
    reward_curve: List[float]
    manifest: Dict[str, Any] = field(default_factory=dict)
    layouts: List[Dict[str, Any]] = field(default_factory=list)


def _format_value(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def _write_text(path: Path, text: str) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            f.write(text)
    except OSError as e:
        raise ExportError(f"Cannot write {path}: {e}")


def write_metrics(path: Union[str, Path], records: Iterable[MetricsRecord]) -> Path:
    path = Path(path)
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(METRICS_HEADER)
            for rec in records:
                for metric, value in record_metrics(rec).items():
                    writer.writerow([rec.scheme, rec.seed, rec.slot, metric, _format_value(value)])
    except OSError as e:
        raise ExportError(f"Cannot write {path}: {e}")
    return path


def write_jsonl(path: Union[str, Path], rows: Iterable[Dict[str, Any]]) -> Path:
    path = Path(path)
    lines = [json.dumps(row, sort_keys=True) + "\n" for row in rows]
    _write_text(path, "".join(lines))
    return path


def export(out_dir: Union[str, Path], records: Sequence[MetricsRecord],
           traces: Sequence[Dict[str, Any]] = (), reward_curve: Optional[Sequence[float]] = None,
           config: Optional[SimConfig] = None, seeds: Optional[Sequence[int]] = None,
           layouts: Sequence[Dict[str, Any]] = ()) -> Dict[str, Path]:
    """Write the run files into `out_dir` and return their paths."""
    if not records:
        raise DomainError("export needs at least one metrics record")
    hashes = sorted({rec.config_hash for rec in records})
    shapes = sorted({(rec.n_uavs, rec.n_gus) for rec in records})
    if len(hashes) != 1 or len(shapes) != 1:
        raise DomainError("export takes the records of a single configuration; write sweep points separately")

    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ExportError(f"Cannot create output directory {out_dir}: {e}")

    paths = {
        "metrics": write_metrics(out_dir / METRICS_FILE, records),
        "traces": write_jsonl(out_dir / TRACES_FILE, traces),
        "layouts": write_jsonl(out_dir / LAYOUTS_FILE, layouts),
        "reward_curve": write_reward_curve(out_dir / REWARD_CURVE_FILE, reward_curve or []),
    }

    config = config or SimConfig()
    if seeds is None:
        seeds = sorted({rec.seed for rec in records})
    manifest = {
        "format_version": MANIFEST_FORMAT_VERSION,
        "config": config.to_dict(),
        "config_hash": hashes[0],
        "n_uavs": shapes[0][0],
        "n_gus": shapes[0][1],
        "schemes": sorted({rec.scheme for rec in records}),
        "seeds": [int(s) for s in seeds],
        "files": {p.name: git_blob_hash(p.read_bytes()) for p in paths.values()},
    }
    paths["manifest"] = out_dir / MANIFEST_FILE
    _write_text(paths["manifest"], json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    logger.info(f"Exported {len(records)} records and {len(traces)} trace rows to {out_dir}")
    return paths


def load_manifest(run_dir: Union[str, Path]) -> Dict[str, Any]:
    path = Path(run_dir) / MANIFEST_FILE
    if not path.exists():
        raise ExportError(f"No manifest in {run_dir}")
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def load_metrics(path: Union[str, Path], n_uavs: int, n_gus: int, config_hash: str) -> List[MetricsRecord]:
    """Rebuild MetricsRecords from the long-form metrics CSV."""
    rows: Dict[Tuple[str, int, int], Dict[str, Optional[float]]] = {}
    with open(path, "r", newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            key = (row["scheme"], int(row["seed"]), int(row["slot"]))
            value = float(row["value"]) if row["value"] != "" else None
            rows.setdefault(key, {})[row["metric"]] = value

    records = []
    for (scheme, seed, slot), metrics in rows.items():
        uav_rates = [metrics[f"uav_rate_{k}"] for k in range(n_uavs)]
        records.append(MetricsRecord(
            scheme=scheme, seed=seed, slot=slot, n_uavs=n_uavs, n_gus=n_gus,
            mean_gu_rate=metrics["mean_gu_rate"], uav_rates=uav_rates, reward=metrics["reward"],
            dc_objective=metrics.get("dc_objective"), config_hash=config_hash,
        ))
    return records


def load_jsonl(path: Union[str, Path]) -> List[Dict[str, Any]]:
    with open(path, "r", encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def load_run(run_dir: Union[str, Path]) -> LoadedRun:
    run_dir = Path(run_dir)
    manifest = load_manifest(run_dir)
    layouts = run_dir / LAYOUTS_FILE
    for name, expected in manifest.get("files", {}).items():
        actual = git_blob_hash((run_dir / name).read_bytes())
        if actual != expected:
            logger.warning(f"{run_dir / name} changed since export ({actual[:12]} != {expected[:12]})")
    return LoadedRun(
        records=load_metrics(run_dir / METRICS_FILE, manifest["n_uavs"], manifest["n_gus"],
                             manifest["config_hash"]),
        traces=load_jsonl(run_dir / TRACES_FILE),
        reward_curve=read_reward_curve(run_dir / REWARD_CURVE_FILE),
        manifest=manifest,
        layouts=load_jsonl(layouts) if layouts.exists() else [],
    )
