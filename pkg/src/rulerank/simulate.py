"""Monte Carlo harness: cohort-structured data, method comparison, metrics.

Each replicate draws matched-pair differences cohort by cohort from
Normal(mean_k, sd^2) and equips them with the nested rule table in which
rule k treats cohorts 1..k (rule 0 treats nobody and serves as control).
Every configured method then selects rules at every confounding bound on
the grid. Power is the average selected-set size; the error rate is the
fraction of replicates whose selection is not contained in the configured
true set (for best-subset runs: does not cover the true set).

Replicates are seeded with a counter-based generator keyed by
(scenario seed, replicate index), so results are independent of execution
order and of the worker count.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from pathlib import Path

import numpy as np

from .core import PairedSample, SensitivityParams
from .errors import RuleRankError, ValidationError
from .selection import SelectionPlan, canonical_method, run_selection

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimulationScenario:
    """Generator and evaluation config for one simulation study."""

    cohort_means: tuple[float, ...]
    cohort_size: int
    gamma_grid: tuple[float, ...]
    true_sets: dict[float, frozenset[int]]
    noise_sd: float = 1.0
    alpha: float = 0.05
    delta: float = 0.0
    methods: tuple[str, ...] = ("bonferroni", "power", "value")
    split_fractions: tuple[float, ...] = (0.5, 0.25)
    replicates: int = 1000
    seed: int = 0
    goal: str = "positive"
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "cohort_means", tuple(float(x) for x in self.cohort_means))
        object.__setattr__(self, "gamma_grid", tuple(float(g) for g in self.gamma_grid))
        object.__setattr__(self, "methods", tuple(canonical_method(m) for m in self.methods))
        object.__setattr__(self, "split_fractions", tuple(float(f) for f in self.split_fractions))
        object.__setattr__(
            self,
            "true_sets",
            {float(g): frozenset(int(r) for r in s) for g, s in self.true_sets.items()},
        )
        if not self.cohort_means:
            raise ValidationError("scenario needs at least one cohort")
        if self.cohort_size < 1 or self.replicates < 1:
            raise ValidationError("cohort_size and replicates must be >= 1")
        if self.seed < 0:
            raise ValidationError("seed must be a nonnegative integer (keys a counter-based stream)")
        if self.goal not in ("positive", "maximal"):
            raise ValidationError(f"unsupported simulation goal {self.goal!r}")
        missing = [g for g in self.gamma_grid if g not in self.true_sets]
        if missing:
            raise ValidationError(f"true_sets missing entries for gamma {missing}")

    @property
    def cohort_count(self) -> int:
        return len(self.cohort_means)

    def cells(self) -> tuple[tuple[str, float | None], ...]:
        """(method, split fraction) combinations actually run."""
        out: list[tuple[str, float | None]] = []
        for m in self.methods:
            if m == "bonferroni":
                out.append((m, None))
            else:
                out.extend((m, f) for f in self.split_fractions)
        return tuple(out)


@dataclass(frozen=True)
class MetricsCell:
    method: str
    split: float | None
    gamma: float
    power: float
    power_se: float
    error_rate: float
    error_se: float
    replicates: int


@dataclass(frozen=True)
class MetricsTable:
    """Aggregated power/error metrics for every (method, split, gamma) cell."""

    scenario: str
    goal: str
    alpha: float
    cells: tuple[MetricsCell, ...]

    def cell(self, method: str, split: float | None, gamma: float) -> MetricsCell:
        method = canonical_method(method)
        for c in self.cells:
            if c.method == method and c.split == split and c.gamma == gamma:
                return c
        raise KeyError((method, split, gamma))

    def to_tsv(self) -> str:
        lines = ["method\tsplit\tgamma\tpower\tpower_se\terror_rate\terror_se\treplicates"]
        for c in self.cells:
            split = "" if c.split is None else f"{c.split:g}"
            lines.append(
                f"{c.method}\t{split}\t{c.gamma:g}\t{c.power:.6f}\t{c.power_se:.6f}"
                f"\t{c.error_rate:.6f}\t{c.error_se:.6f}\t{c.replicates}"
            )
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "scenario": self.scenario,
            "goal": self.goal,
            "alpha": self.alpha,
            "cells": [dataclasses.asdict(c) for c in self.cells],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def generate_replicate(scenario: SimulationScenario, replicate_index: int) -> PairedSample:
    """Deterministic sample for one replicate: (seed, index) keys the stream."""
    key = np.array([scenario.seed, replicate_index], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    k = scenario.cohort_count
    size = scenario.cohort_size
    cohort = np.repeat(np.arange(1, k + 1), size)
    d = rng.normal(np.repeat(scenario.cohort_means, size), scenario.noise_sd)
    rules = (cohort[:, None] <= np.arange(k + 1)[None, :]).astype(np.uint8)
    rules[:, 0] = 0
    return PairedSample(pair_ids=np.arange(d.size), d=d, rules=rules)


def _split_seed(scenario: SimulationScenario, replicate_index: int, fraction_index: int) -> int:
    ss = np.random.SeedSequence([scenario.seed, replicate_index, fraction_index, 0x5EED])
    return int(ss.generate_state(1)[0])


def _replicate_metrics(scenario: SimulationScenario, replicate_index: int) -> np.ndarray:
    """(cells x gammas x 2) array of (selected size, selection ok) for one replicate."""
    sample = generate_replicate(scenario, replicate_index)
    cells = scenario.cells()
    fractions = {f: i for i, f in enumerate(scenario.split_fractions)}
    out = np.zeros((len(cells), len(scenario.gamma_grid), 2))
    for ci, (method, split) in enumerate(cells):
        plan = SelectionPlan(
            goal=scenario.goal,  # type: ignore[arg-type]
            method=method,  # type: ignore[arg-type]
            split_fraction=split if split is not None else 0.5,
            seed=_split_seed(scenario, replicate_index, fractions.get(split, 0)),
        )
        for gi, gamma in enumerate(scenario.gamma_grid):
            params = SensitivityParams(gamma=gamma, alpha=scenario.alpha, delta=scenario.delta)
            try:
                result = run_selection(sample, params, plan)
                selected = result.positive_set if scenario.goal == "positive" else result.maximal_set
                assert selected is not None
            except RuleRankError as exc:
                log.warning(
                    "replicate %d %s gamma=%g failed (%s); counting an empty selection",
                    replicate_index,
                    method,
                    gamma,
                    exc,
                )
                selected = frozenset()
            truth = scenario.true_sets[gamma]
            ok = selected <= truth if scenario.goal == "positive" else truth <= selected
            out[ci, gi, 0] = len(selected)
            out[ci, gi, 1] = 1.0 if ok else 0.0
    return out


def run_scenario(scenario: SimulationScenario, workers: int = 1) -> MetricsTable:
    """Run all replicates and aggregate; bit-identical for any worker count."""
    indices = range(scenario.replicates)
    if workers <= 1:
        stacked = np.stack([_replicate_metrics(scenario, i) for i in indices])
    else:
        chunk = max(1, scenario.replicates // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            stacked = np.stack(
                list(pool.map(partial(_replicate_metrics, scenario), indices, chunksize=chunk))
            )
    reps = scenario.replicates
    cells = []
    for ci, (method, split) in enumerate(scenario.cells()):
        for gi, gamma in enumerate(scenario.gamma_grid):
            sizes = stacked[:, ci, gi, 0]
            ok = stacked[:, ci, gi, 1]
            power = float(sizes.mean())
            power_se = float(sizes.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
            err = 1.0 - float(ok.mean())
            err_se = math.sqrt(err * (1.0 - err) / reps)
            cells.append(
                MetricsCell(
                    method=method,
                    split=split,
                    gamma=gamma,
                    power=power,
                    power_se=power_se,
                    error_rate=err,
                    error_se=err_se,
                    replicates=reps,
                )
            )
    return MetricsTable(
        scenario=scenario.name,
        goal=scenario.goal,
        alpha=scenario.alpha,
        cells=tuple(cells),
    )


def scenario_to_dict(scenario: SimulationScenario) -> dict:
    doc = dataclasses.asdict(scenario)
    doc["true_sets"] = {f"{g:g}": sorted(s) for g, s in scenario.true_sets.items()}
    return doc


def scenario_from_dict(doc: dict) -> SimulationScenario:
    known = {f.name for f in dataclasses.fields(SimulationScenario)}
    unknown = set(doc) - known
    if unknown:
        raise ValidationError(f"unknown scenario fields: {sorted(unknown)}")
    try:
        return SimulationScenario(**doc)
    except TypeError as exc:
        raise ValidationError(f"bad scenario document: {exc}") from exc


def load_scenario(path: str | Path) -> SimulationScenario:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"scenario file {path} is not valid JSON: {exc}") from exc
    return scenario_from_dict(doc)


def dump_scenario(scenario: SimulationScenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=2, sort_keys=True) + "\n")
