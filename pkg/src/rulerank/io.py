"""File formats: the pairs CSV, a minimal exact-key matcher, and JSON reports.

Pairs CSV schema: header ``pair_id,d,rule_0,...,rule_K``; one row per
matched pair; d is the treated-minus-control outcome difference; rule cells
are 0/1. Reports are schema-versioned JSON with deterministic key order so
identical runs produce identical bytes.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import PairedSample
from .errors import NoMatches, ParseError, ValidationError

REPORT_SCHEMA = "rulerank/report-v1"


def _rule_columns(header: list[str]) -> int:
    if header[:2] != ["pair_id", "d"]:
        raise ValidationError(f"pairs file must start with columns pair_id,d; got {header[:2]}")
    rules = header[2:]
    expected = [f"rule_{k}" for k in range(len(rules))]
    if not rules or rules != expected:
        raise ValidationError(f"rule columns must be rule_0..rule_{{K}} in order; got {rules}")
    return len(rules)


def load_pairs(path: str | Path) -> PairedSample:
    """Read and validate a pairs CSV; row order is preserved."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path} is empty") from None
        rule_count = _rule_columns(header)
        ids: list[str] = []
        d: list[float] = []
        rules: list[list[int]] = []
        seen: set[str] = set()
        for row_no, row in enumerate(reader, start=2):
            if len(row) != 2 + rule_count:
                raise ParseError(
                    f"expected {2 + rule_count} cells, found {len(row)}", row=row_no
                )
            pair_id = row[0]
            if not pair_id:
                raise ParseError("empty pair_id", row=row_no, column="pair_id")
            if pair_id in seen:
                raise ValidationError(f"duplicate pair_id {pair_id!r} (row {row_no})")
            seen.add(pair_id)
            try:
                value = float(row[1])
            except ValueError:
                raise ParseError(f"cannot parse d value {row[1]!r}", row=row_no, column="d") from None
            if math.isnan(value):
                raise ParseError("d is NaN", row=row_no, column="d")
            cells = []
            for k, cell in enumerate(row[2:]):
                if cell not in ("0", "1"):
                    raise ValidationError(
                        f"rule cell must be 0 or 1, got {cell!r} (row {row_no}, column rule_{k})"
                    )
                cells.append(int(cell))
            ids.append(pair_id)
            d.append(value)
            rules.append(cells)
    if len(d) < 2:
        raise ValidationError(f"{path} holds {len(d)} pair rows; at least 2 are required")
    return PairedSample(
        pair_ids=np.array(ids, dtype=object),
        d=np.array(d),
        rules=np.array(rules, dtype=np.uint8),
    )


def write_pairs(sample: PairedSample, path: str | Path) -> None:
    """Write a sample back to the pairs CSV schema (exact float round-trip)."""
    header = ["pair_id", "d"] + [f"rule_{k}" for k in range(sample.rule_count)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(sample.n):
            writer.writerow(
                [str(sample.pair_ids[i]), repr(float(sample.d[i]))]
                + [str(int(v)) for v in sample.rules[i]]
            )


@dataclass(frozen=True)
class MatchResult:
    """Greedy matcher output: pair rows ready for CSV plus leftovers."""

    rows: tuple[dict, ...]
    unmatched_rows: tuple[int, ...]
    rule_cols: tuple[str, ...]


def match_pairs(
    units_path: str | Path,
    keys: list[str],
    treatment_col: str,
    outcome_col: str,
) -> MatchResult:
    """Greedy exact matching of treated to control units on key columns.

    Within each key stratum, treated and control units pair in file order
    until one side is exhausted; d = treated outcome - control outcome.
    ``rule_*`` columns, when present, are carried through and must agree
    within each pair. Raises NoMatches when no pair forms.
    """
    with open(units_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in [*keys, treatment_col, outcome_col]:
            if col not in header:
                raise ValidationError(f"units file lacks column {col!r}")
        rule_cols = [c for c in header if c.startswith("rule_")]
        strata: dict[tuple, dict[str, list]] = {}
        order: list[tuple] = []
        for row_no, row in enumerate(reader, start=2):
            treat = row[treatment_col]
            if treat not in ("0", "1"):
                raise ValidationError(
                    f"treatment must be 0 or 1, got {treat!r} (row {row_no})"
                )
            try:
                outcome = float(row[outcome_col])
            except (TypeError, ValueError):
                raise ParseError(
                    f"cannot parse outcome {row[outcome_col]!r}", row=row_no, column=outcome_col
                ) from None
            for col in rule_cols:
                if row[col] not in ("0", "1"):
                    raise ValidationError(
                        f"rule cell must be 0 or 1, got {row[col]!r} (row {row_no}, column {col})"
                    )
            key = tuple(row[c] for c in keys)
            if key not in strata:
                strata[key] = {"1": [], "0": []}
                order.append(key)
            strata[key][treat].append((row_no, outcome, [row[c] for c in rule_cols]))
    rows: list[dict] = []
    unmatched: list[int] = []
    for key in order:
        treated = strata[key]["1"]
        controls = strata[key]["0"]
        for (t_row, t_y, t_rules), (c_row, c_y, c_rules) in zip(treated, controls):
            if t_rules != c_rules:
                raise ValidationError(
                    f"rule decisions disagree within a matched pair (rows {t_row} and {c_row})"
                )
            record = {"pair_id": f"p{len(rows):04d}", "d": repr(t_y - c_y)}
            record.update({col: val for col, val in zip(rule_cols, t_rules)})
            rows.append(record)
        for extra in treated[len(controls) :] + controls[len(treated) :]:
            unmatched.append(extra[0])
    if not rows:
        raise NoMatches("no treated/control pair shares a key stratum")
    return MatchResult(rows=tuple(rows), unmatched_rows=tuple(sorted(unmatched)), rule_cols=tuple(rule_cols))


def write_matched(result: MatchResult, path: str | Path) -> None:
    fields = ["pair_id", "d", *result.rule_cols]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(result.rows)


def jsonable(value):
    """Recursively convert analysis objects for JSON: inf/nan become strings."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (frozenset, set)):
        return [jsonable(v) for v in sorted(value)]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        value = float(value)
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return value
    return value


def make_report(command: str, config: dict, analyses: list[dict]) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "command": command,
        "config": jsonable(config),
        "analyses": jsonable(analyses),
    }


def report_text(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
