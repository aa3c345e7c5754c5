"""Run manifests and CSV / JSON / Markdown serialization of reports."""
from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import __version__

FORMATS = ("csv", "json", "md")


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    command: str
    inputs: Dict[str, Dict[str, str]] = field(default_factory=dict)
    partition_source: str = "detected"
    weights: Optional[dict] = None
    plan: Optional[dict] = None
    conventions: Optional[dict] = None
    extra: Dict[str, object] = field(default_factory=dict)
    version: str = __version__

    def add_input(self, role: str, path) -> None:
        self.inputs[role] = {"path": str(path), "sha256": file_digest(path)}

    def to_dict(self) -> dict:
        d = {
            "tool": "commvul",
            "version": self.version,
            "command": self.command,
            "inputs": self.inputs,
            "partition_source": self.partition_source,
        }
        for key in ("weights", "plan", "conventions"):
            value = getattr(self, key)
            if value is not None:
                d[key] = value
        d.update(self.extra)
        return d


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def _csv(rows: Sequence[dict], manifest: RunManifest) -> str:
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(manifest.to_dict(), sort_keys=True) + "\n")
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(v) for k, v in row.items()})
    return buf.getvalue()


def _markdown(title: str, rows: Sequence[dict], manifest: RunManifest,
              notes: Sequence[str] = ()) -> str:
    lines = [f"# {title}", ""]
    if rows:
        header = list(rows[0])
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "---|" * len(header))
        for row in rows:
            cells = [format(v, ".4f") if isinstance(v, float) else str(v) for v in row.values()]
            lines.append("| " + " | ".join(cells) + " |")
        lines.append("")
    lines.extend(notes)
    if notes:
        lines.append("")
    lines.append("<!-- manifest: " + json.dumps(manifest.to_dict(), sort_keys=True) + " -->")
    return "\n".join(lines) + "\n"


def _json(payload: dict, manifest: RunManifest) -> str:
    return json.dumps({"manifest": manifest.to_dict(), **payload}, indent=2, sort_keys=True,
                      allow_nan=True) + "\n"


def render(kind: str, payload: dict, rows: List[dict], manifest: RunManifest, fmt: str,
           notes: Sequence[str] = ()) -> str:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    if fmt == "json":
        return _json(payload, manifest)
    if fmt == "csv":
        return _csv(rows, manifest)
    return _markdown(kind, rows, manifest, notes)


def render_vulnerability(report, manifest: RunManifest, fmt: str = "csv") -> str:
    from .vulnerability import rank_report

    ranks = rank_report(report)
    notes = [
        f"Proposed order (least to most vulnerable): {ranks['proposed']}",
        f"Classical order (least to most vulnerable): {ranks['classical']}",
    ] + [f"Warning: {w}" for w in report.warnings]
    return render("Community vulnerability", report.to_dict(), report.rows(), manifest, fmt, notes)


def render_sobol(report, manifest: RunManifest, fmt: str = "csv") -> str:
    notes = [f"Estimator: {report.plan.estimator_id}; N = {report.plan.n_samples}, seed = {report.plan.seed}"]
    notes += [f"Warning: {w}" for w in report.warnings]
    return render("Sobol' sensitivity of community vulnerability", report.to_dict(),
                  report.rows(), manifest, fmt, notes)


def render_partition(partition, trace, q: float, manifest: RunManifest, fmt: str = "json") -> str:
    payload = {"modularity": q, "partition": partition.to_dict(), "trace": trace.to_dict()}
    rows = [{"community": c, "size": len(m), "members": " ".join(map(str, m))}
            for c, m in enumerate(partition.communities, start=1)]
    return render("Detected communities", payload, rows, manifest, fmt,
                  [f"k = {partition.k}, Q = {q:.4f}"])
