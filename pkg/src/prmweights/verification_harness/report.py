"""Sweep reports and their CSV / JSON renderings.

A report serialises with sorted keys and fixed indentation, and leaves wall
time out unless asked, so the same sweep at the same version always yields
the same bytes.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

from .. import __version__

REPORT_SCHEMA = "prmweights.sweep_report/1"

TABLE_COLUMNS = (
    "q", "d", "m", "r", "l", "c", "j", "H_j", "pi_term", "e_bdg", "e_bt", "e_affine",
    "oracle", "exhaustive", "threshold_main", "threshold_l1",
)


@dataclass
class SweepReport:
    target: str
    params: dict = field(default_factory=dict)
    grid_size: int = 0
    passes: int = 0
    failures: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    exhaustive: bool | None = None
    notes: dict = field(default_factory=dict)
    wall_time: float = 0.0
    version: str = __version__

    @property
    def ok(self) -> bool:
        return not self.failures and self.passes == self.grid_size

    def record(self, ok: bool, params: dict, **detail) -> None:
        self.grid_size += 1
        if ok:
            self.passes += 1
        else:
            self.failures.append({"params": dict(params), **detail})

    def minimal_failure(self) -> dict | None:
        """The failing tuple with the smallest parameters (sum first, then lexicographic)."""
        if not self.failures:
            return None

        def key(f):
            vals = [v for _, v in sorted(f["params"].items()) if isinstance(v, int)]
            flat = []
            for _, v in sorted(f["params"].items()):
                if isinstance(v, (list, tuple)):
                    flat.extend(x for x in v if isinstance(x, int))
            return (sum(vals) + sum(flat), vals, flat)

        return min(self.failures, key=key)

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "schema": REPORT_SCHEMA,
            "version": self.version,
            "target": self.target,
            "params": self.params,
            "grid_size": self.grid_size,
            "passes": self.passes,
            "failures": self.failures,
            "witnesses": self.witnesses,
            "rows": self.rows,
            "exhaustive": self.exhaustive,
            "notes": self.notes,
            "ok": self.ok,
        }
        if timing:
            out["wall_time"] = self.wall_time
        return out

    def dumps(self, timing: bool = False) -> str:
        return json.dumps(self.to_json(timing), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, data: dict) -> "SweepReport":
        if data.get("schema") != REPORT_SCHEMA:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        return cls(
            target=data["target"], params=data["params"], grid_size=data["grid_size"],
            passes=data["passes"], failures=data["failures"], witnesses=data["witnesses"],
            rows=data["rows"], exhaustive=data["exhaustive"], notes=data["notes"],
            wall_time=data.get("wall_time", 0.0), version=data["version"],
        )


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def render_csv(report: SweepReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_COLUMNS)
    for row in report.rows:
        w.writerow([_cell(row.get(c)) for c in TABLE_COLUMNS])
    return buf.getvalue()


def emit_table(report: SweepReport, fmt: str = "csv", path: str | Path | None = None,
               timing: bool = False) -> str:
    """Render the report as CSV (per-r rows, fixed columns) or JSON; write to ``path`` if given."""
    if fmt == "csv":
        text = render_csv(report)
    elif fmt == "json":
        text = report.dumps(timing)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text
