"""Experiment reports: JSON (schema-validated) and CSV serialization.

Exact rationals are written as ``{"num": "...", "den": "...", "float": x}``
in JSON and as ``num/den`` strings in CSV, with a companion ``<key>_float``
column.  Floats are for reading only; verdict columns are computed from the
exact values.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import jsonschema


def rational_obj(x) -> dict:
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator), "float": float(x)}


def rational_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def parse_rational(obj) -> Fraction:
    if isinstance(obj, dict):
        return Fraction(int(obj["num"]), int(obj["den"]))
    return Fraction(str(obj))


def _jsonable(v):
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, Fraction):
        return rational_obj(v)
    if isinstance(v, int):
        # keep huge exact counts lossless
        return v if abs(v) < 2**53 else rational_obj(v)
    if isinstance(v, float):
        return v
    raise TypeError(f"cannot serialize {type(v).__name__} in a report row")


def _load_schema() -> dict:
    return json.loads(resources.files("matchcount").joinpath("report.schema.json").read_text())


REPORT_SCHEMA = _load_schema()


@dataclass
class ExperimentReport:
    command: str
    config: dict
    seed: int | None = None
    rows: list[dict] = field(default_factory=list)

    def add_row(self, row: dict, runtime_ms: float | None = None):
        row = dict(row)
        row["runtime_ms"] = runtime_ms
        self.rows.append(row)

    def to_json_obj(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "rows": [{k: _jsonable(v) for k, v in r.items()} for r in self.rows],
        }

    def to_json(self) -> str:
        obj = self.to_json_obj()
        validate(obj)
        return json.dumps(obj, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        obj = json.loads(text)
        validate(obj)
        rows = []
        for r in obj["rows"]:
            rows.append({k: parse_rational(v) if isinstance(v, dict) else v for k, v in r.items()})
        return cls(obj["command"], obj["config"], obj["seed"], rows)

    def columns(self) -> list[str]:
        cols: list[str] = []
        for r in self.rows:
            for k, v in r.items():
                if k not in cols:
                    cols.append(k)
                if isinstance(v, Fraction) and f"{k}_float" not in cols:
                    cols.append(f"{k}_float")
        return cols

    def to_csv(self) -> str:
        cols = self.columns()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            out = []
            for c in cols:
                if c in r:
                    v = r[c]
                    out.append(rational_str(v) if isinstance(v, Fraction) else "" if v is None else v)
                elif c.endswith("_float") and isinstance(r.get(c[:-6]), Fraction):
                    out.append(repr(float(r[c[:-6]])))
                else:
                    out.append("")
            w.writerow(out)
        return buf.getvalue()


def validate(obj: dict):
    jsonschema.validate(obj, REPORT_SCHEMA)
