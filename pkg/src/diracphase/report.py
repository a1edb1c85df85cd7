"""Report bundles and their deterministic CSV / JSON emission."""

from __future__ import annotations

import csv
import io
import json
import math
import platform
from dataclasses import dataclass, field
from importlib import metadata

import numpy as np

from .config import format_complex


@dataclass
class Table:
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)

    def add(self, *row):
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} cells, table has {len(self.columns)} columns")
        self.rows.append(tuple(row))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


@dataclass
class Verdict:
    passed: bool
    value: object = None
    threshold: object = None

    def __post_init__(self):
        self.passed = bool(self.passed)


@dataclass
class ReportBundle:
    experiment: str
    config_echo: dict
    table: Table
    verdicts: dict[str, Verdict] = field(default_factory=dict)
    runtimes: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts.values())

    def to_jsonable(self) -> dict:
        return {
            "experiment": self.experiment,
            "config_echo": {k: jsonable(v) for k, v in self.config_echo.items()},
            "tables": {"main": {"columns": list(self.table.columns),
                                "rows": [[jsonable(c) for c in r] for r in self.table.rows]}},
            "verdicts": {k: {"pass": bool(v.passed), "value": jsonable(v.value),
                             "threshold": jsonable(v.threshold)}
                         for k, v in self.verdicts.items()},
            "versions": versions(),
        }


def versions() -> dict:
    out = {"python": platform.python_version()}
    for pkg in ("artifact", "numpy", "scipy", "mpmath"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = "unknown"
    return out


def _plain(v):
    if isinstance(v, np.generic):
        return v.item()
    return v


def format_cell(v) -> str:
    """Shortest round-trip text: floats via ``repr``, complex as ``re+imj``."""
    v = _plain(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, complex):
        return format_complex(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def jsonable(v):
    v = _plain(v)
    if isinstance(v, complex):
        return format_complex(v)
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    return v


def render_csv(bundle: ReportBundle) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(bundle.table.columns)
    for row in bundle.table.rows:
        w.writerow([format_cell(c) for c in row])
    return buf.getvalue()


def render_json(bundle: ReportBundle) -> str:
    return json.dumps(bundle.to_jsonable(), indent=2, sort_keys=False) + "\n"


def emit_report(bundle: ReportBundle, fmt: str = "csv", out_path=None) -> str:
    """Render the bundle; write it to ``out_path`` when given.  Returns the text."""
    if fmt == "csv":
        text = render_csv(bundle)
    elif fmt == "json":
        text = render_json(bundle)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if out_path is not None:
        try:
            with open(out_path, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {out_path}: {exc.strerror}") from exc
    return text
