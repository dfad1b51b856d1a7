"""Report containers and JSON/CSV emission, exact rationals first-class.

Rationals are always emitted as exact 'p/q' strings; fields that benefit
from a readable value get a parallel *_decimal rendering (round-half-even
at a configurable number of digits).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .rational import as_fraction, decimal_str, format_rational

DEFAULT_PRECISION = 12


def put_rational(doc: dict, key: str, q, precision: int = DEFAULT_PRECISION):
    """Store q under key as an exact string plus a key_decimal rendering."""
    q = as_fraction(q)
    doc[key] = format_rational(q)
    doc[key + "_decimal"] = decimal_str(q, precision)
    return doc


@dataclass
class VerificationReport:
    """Outcome of an equilibrium / dominance / inconsistency style check."""

    verdict: str  # "PASS" or "FAIL"
    witnesses: list = field(default_factory=list)
    settings: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def to_json_dict(self, precision: int = DEFAULT_PRECISION) -> dict:
        witnesses = []
        for w in self.witnesses:
            entry = {}
            for k, v in w.items():
                if isinstance(v, Fraction):
                    put_rational(entry, k, v, precision)
                else:
                    entry[k] = v
            witnesses.append(entry)
        provenance = {}
        for k, v in self.provenance.items():
            if isinstance(v, Fraction):
                put_rational(provenance, k, v, precision)
            else:
                provenance[k] = v
        return {
            "verdict": self.verdict,
            "witnesses": witnesses,
            "settings": jsonable(self.settings),
            "provenance": provenance,
        }


def jsonable(value, precision: int = DEFAULT_PRECISION):
    """Recursively convert Fractions to exact strings for JSON emission."""
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, dict):
        return {k: jsonable(v, precision) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v, precision) for v in value]
    return value


def dump_json(doc: dict) -> str:
    """Deterministic JSON rendering (sorted keys, stable separators)."""
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_csv_rows(out, fieldnames, rows):
    writer = csv.DictWriter(out, fieldnames=fieldnames)
    writer.writeheader()
    for row in rows:
        writer.writerow(row)


def load_report_schema() -> dict:
    with resources.files("ticlab.data").joinpath("report_schema.json").open("r") as fh:
        return json.load(fh)


def validate_report(doc: dict):
    """Validate a CLI report document against the shipped schema."""
    import jsonschema

    jsonschema.validate(doc, load_report_schema())
