"""Experiment reports: one JSON document plus aligned CSV tables per experiment."""

import csv
import json
import math
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime
from typing import Any, Dict, Iterable, List, Optional

from domain.errors import IOFailure


@dataclass
class MetricsReport:
    """Result of one experiment run."""
    experiment: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    metrics: Dict[str, float] = field(default_factory=dict)
    per_seed: Dict[str, Dict[str, float]] = field(default_factory=dict)
    tables: Dict[str, List[Dict[str, Any]]] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def check(self, declared: Iterable[str] = ()) -> List[str]:
        """Problems with the report: missing declared metrics, non-finite values."""
        problems = [f"missing metric {name}" for name in declared if name not in self.metrics]
        for name, value in self.metrics.items():
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                problems.append(f"metric {name} is not finite: {value!r}")
        for seed, values in self.per_seed.items():
            for name, value in values.items():
                if not math.isfinite(value):
                    problems.append(f"seed {seed} metric {name} is not finite: {value!r}")
        return problems

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MetricsReport":
        return cls(experiment=data["experiment"], parameters=data.get("parameters", {}),
                   metrics=data.get("metrics", {}), per_seed=data.get("per_seed", {}),
                   tables=data.get("tables", {}), notes=data.get("notes", []))


def save_json(report: MetricsReport, path: str) -> str:
    """Write ``report`` as indented JSON with sorted keys."""
    try:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(report.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")
    except OSError as e:
        raise IOFailure(f"cannot write {path}: {e}") from e
    return path


def load_json(path: str) -> MetricsReport:
    try:
        with open(path, encoding="utf-8") as f:
            return MetricsReport.from_dict(json.load(f))
    except (OSError, ValueError, KeyError) as e:
        raise IOFailure(f"cannot read report {path}: {e}") from e


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def save_csv(rows: List[Dict[str, Any]], path: str) -> str:
    """Write table rows; the column order follows the first row."""
    if not rows:
        return path
    columns = list(rows[0])
    for row in rows[1:]:
        columns += [c for c in row if c not in columns]
    try:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_cell(row.get(c, "")) for c in columns])
    except OSError as e:
        raise IOFailure(f"cannot write {path}: {e}") from e
    return path


def save_report(report: MetricsReport, out_dir: str) -> List[str]:
    """
    Write ``<experiment>.json``, ``<experiment>.csv`` (metric table) and one
    ``<experiment>_<table>.csv`` per extra table.

    Returns:
        paths written
    """
    written = [save_json(report, os.path.join(out_dir, f"{report.experiment}.json"))]
    metric_rows = [{"metric": name, "value": value} for name, value in sorted(report.metrics.items())]
    written.append(save_csv(metric_rows, os.path.join(out_dir, f"{report.experiment}.csv")))
    for name, rows in sorted(report.tables.items()):
        if rows:
            written.append(save_csv(rows, os.path.join(out_dir, f"{report.experiment}_{name}.csv")))
    return written


def merge_reports(reports: List[MetricsReport], extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Combine reports into one document keyed by experiment name."""
    merged: Dict[str, Any] = {"generated": datetime.now().isoformat(timespec="seconds"),
                              "experiments": {}}
    for report in reports:
        merged["experiments"][report.experiment] = {
            "parameters": report.parameters, "metrics": report.metrics, "notes": report.notes}
    if extra:
        merged.update(extra)
    return merged


def print_report(report: MetricsReport):
    """Print a formatted report."""
    print("\n" + "=" * 70)
    print(f"EXPERIMENT: {report.experiment.upper()}")
    print("=" * 70)
    if report.parameters:
        for name, value in sorted(report.parameters.items()):
            print(f"  {name + ':':<28} {value}")

    print("\n" + "-" * 70)
    print("METRICS")
    print("-" * 70)
    for name, value in sorted(report.metrics.items()):
        shown = f"{value:.4f}" if isinstance(value, float) else str(value)
        print(f"  {name + ':':<28} {shown}")

    if report.per_seed:
        print("\n" + "-" * 70)
        print(f"PER SEED ({len(report.per_seed)})")
        print("-" * 70)
        for seed, values in sorted(report.per_seed.items()):
            joined = ", ".join(f"{k}={v:.3f}" for k, v in sorted(values.items()))
            print(f"  {seed}: {joined}")

    for note in report.notes:
        print(f"  note: {note}")
    print("\n" + "=" * 70)
