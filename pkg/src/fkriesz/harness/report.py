"""Verdicts, tables and plot data collected during a run, and their on-disk form.

Layout under the output directory::

    report.json          verdicts, environment stamp, manifest (sha256 of every other file)
    tables/<name>.csv    RFC-4180 CSV
    plots/<name>.dat     two whitespace-separated columns

Numbers are written with repr(), so identical floats give identical bytes.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

PASS, FAIL, LOW, NOT_EVALUATED = "pass", "fail", "low-precision", "not-evaluated"
_RANK = {PASS: 0, LOW: 1, NOT_EVALUATED: 1, FAIL: 2}
EXIT_CODES = {PASS: 0, FAIL: 1, LOW: 2, NOT_EVALUATED: 2}
EXIT_CONFIG = 64


@dataclass
class Verdict:
    claim: str
    rule: str
    status: str
    numbers: dict = field(default_factory=dict)
    label: str | None = None


def _plain(v):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    return v


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    return str(v)


class Report:
    """Mutable run record; experiments append verdicts, tables and plot series."""

    def __init__(self, experiment: str, criteria, stamp: dict, budget: float | None = None):
        self.experiment = experiment
        self.criteria = list(criteria)
        self.stamp = stamp
        self.verdicts: list[Verdict] = []
        self.tables: dict[str, tuple[list, list]] = {}
        self.plots: dict[str, tuple[str, str, np.ndarray, np.ndarray]] = {}
        self.budget = budget
        self.charged = 0.0
        self.manifest: list[dict] = []

    # -- collection
    def verdict(self, claim: str, rule: str, ok: bool | None, label: str | None = None,
                status: str | None = None, **numbers) -> Verdict:
        if status is None:
            status = PASS if ok else FAIL
        v = Verdict(claim, rule, status, numbers, label)
        self.verdicts.append(v)
        return v

    def afford(self, normals: float, claim: str, rule: str) -> bool:
        """Charge an estimated normal count; over budget records a not-evaluated verdict."""
        if self.budget is not None and self.charged + normals > self.budget:
            self.verdict(claim, rule, None, status=NOT_EVALUATED, estimated_normals=float(normals),
                         budget_remaining=float(self.budget - self.charged))
            return False
        self.charged += normals
        return True

    def table(self, name: str, header, rows) -> None:
        self.tables[name] = (list(header), [list(r) for r in rows])

    def plot(self, name: str, xlabel: str, ylabel: str, x, y) -> None:
        self.plots[name] = (xlabel, ylabel, np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    # -- summary
    @property
    def status(self) -> str:
        if not self.verdicts:
            return NOT_EVALUATED
        return max((v.status for v in self.verdicts), key=lambda s: (_RANK[s], s == NOT_EVALUATED))

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_dict(self) -> dict:
        return _plain({
            "experiment": self.experiment,
            "criteria": self.criteria,
            "status": self.status,
            "verdicts": [{"claim": v.claim, "rule": v.rule, "status": v.status, "label": v.label,
                          "numbers": v.numbers} for v in self.verdicts],
            "environment": self.stamp,
            "estimated_normals": self.charged,
            "manifest": self.manifest,
        })


def csv_bytes(header, rows) -> bytes:
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(c) for c in r])
    return buf.getvalue().encode("utf-8")


def plot_bytes(xlabel: str, ylabel: str, x, y) -> bytes:
    lines = [f"# {xlabel} {ylabel}"]
    lines += [f"{float(a)!r} {float(b)!r}" for a, b in zip(x, y)]
    return ("\n".join(lines) + "\n").encode("utf-8")


def _write(path: Path, data: bytes) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def emit(report: Report, out_dir) -> Path:
    """Write tables, plots and report.json; returns the report path.  Overwrites in place."""
    out = Path(out_dir)
    files = {}
    for name, (header, rows) in sorted(report.tables.items()):
        files[f"tables/{name}.csv"] = csv_bytes(header, rows)
    for name, (xl, yl, x, y) in sorted(report.plots.items()):
        files[f"plots/{name}.dat"] = plot_bytes(xl, yl, x, y)
    report.manifest = []
    for rel, data in files.items():
        _write(out / rel, data)
        report.manifest.append({"path": rel, "bytes": len(data), "sha256": hashlib.sha256(data).hexdigest()})
    path = out / "report.json"
    _write(path, (json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n").encode("utf-8"))
    return path
