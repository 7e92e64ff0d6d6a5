"""Result tables and on-disk experiment layout.

Each run writes ``output_dir/{study}/{timestamp}/`` containing

``results.csv``
    columns ``label, statistic, value, tolerance, passed``; byte-identical for
    identical config and seed.
``meta.json``
    config hash, seed, toolkit version, backend, timestamp and overall status.
``config.json`` (and ``config.toml`` when the run came from a file)
    the configuration that produced the table.

Studies may add plot-data CSVs under ``data/``.
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .. import __version__, kernels

__all__ = ["Row", "ResultTable", "write_run"]


@dataclass(frozen=True)
class Row:
    label: str
    statistic: str
    value: float
    tolerance: str
    passed: bool


def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return repr(v)
    return str(v)


@dataclass
class ResultTable:
    study: str
    seed: int
    config_hash: str
    rows: list = field(default_factory=list)
    data: dict = field(default_factory=dict)  # file name -> CSV text

    def add(self, label, statistic, value, tolerance, passed) -> Row:
        row = Row(str(label), str(statistic), float(value), str(tolerance), bool(passed))
        self.rows.append(row)
        return row

    @property
    def passed(self) -> bool:
        return bool(self.rows) and all(r.passed for r in self.rows)

    def failures(self) -> list:
        return [r for r in self.rows if not r.passed]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "statistic", "value", "tolerance", "passed"])
        for r in self.rows:
            w.writerow([r.label, r.statistic, _fmt(r.value), r.tolerance,
                        "true" if r.passed else "false"])
        return buf.getvalue()

    def meta(self, timestamp: str | None = None) -> dict:
        return {
            "study": self.study,
            "seed": self.seed,
            "config_hash": self.config_hash,
            "version": __version__,
            "backend": kernels.BACKEND,
            "timestamp": timestamp,
            "rows": len(self.rows),
            "failed": len(self.failures()),
            "passed": self.passed,
        }

    def summary(self) -> str:
        lines = [f"{self.study}: {'PASS' if self.passed else 'FAIL'} "
                 f"({len(self.rows) - len(self.failures())}/{len(self.rows)} rows)"]
        for r in self.failures():
            lines.append(f"  failed {r.label} {r.statistic}={_fmt(r.value)} ({r.tolerance})")
        return "\n".join(lines)


def write_run(table: ResultTable, config, output_dir=None) -> Path:
    """Write ``table`` and its provenance; returns the run directory."""
    now = _dt.datetime.now(_dt.timezone.utc)
    stamp = now.strftime("%Y%m%dT%H%M%S%fZ")
    root = Path(output_dir if output_dir is not None else config.output_dir)
    run = root / table.study / stamp
    run.mkdir(parents=True, exist_ok=False)
    (run / "results.csv").write_text(table.to_csv())
    (run / "meta.json").write_text(json.dumps(table.meta(now.isoformat()), indent=2) + "\n")
    (run / "config.json").write_text(json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n")
    if config.source is not None:
        (run / "config.toml").write_text(config.source)
    if table.data:
        (run / "data").mkdir()
        for name, text in sorted(table.data.items()):
            (run / "data" / name).write_text(text)
    return run
