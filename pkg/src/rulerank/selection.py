"""FWER-controlled engines for ordering, best-subset, and positive-rule selection.

Three goals share one machinery. Each goal is a family of one-sided
dominance hypotheses H_ij: "rule i is not dominated by rule j (by margin)".
Either every hypothesis is tested on the full sample with a Bonferroni
share of alpha, or the sample is split: the planning half estimates each
comparison's prospects (approximate power at the working confounding bound,
or its plug-in value difference), the hypotheses are sorted by that
estimate, and the testing half runs them in a fixed sequence at full alpha,
stopping at the first non-rejection. Both schemes control the probability
of any false claim at alpha.

For best-subset selection one rejection per source rule already removes it
from the candidate set, so the ordered sequence is pruned to the first
hypothesis per source before testing.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .core import PairedSample, SensitivityParams, build_comparison_frame
from .dominance import test_frame
from .errors import (
    DegenerateVariance,
    IdenticalRules,
    TooFewPairs,
    ValidationError,
    ZeroDenominator,
)
from .order import undominated
from .sensitivity import approx_power, asymptotic_params, moment_summary

Goal = Literal["order", "maximal", "positive"]
Method = Literal["bonferroni", "power", "value"]

_METHOD_ALIASES = {"power_ordered": "power", "value_ordered": "value"}


def canonical_method(name: str) -> str:
    method = _METHOD_ALIASES.get(name, name)
    if method not in ("bonferroni", "power", "value"):
        raise ValidationError(f"unknown method {name!r}")
    return method


@dataclass(frozen=True)
class Hypothesis:
    """H: rule ``from_rule`` is not dominated by rule ``to_rule`` by ``margin``."""

    from_rule: int
    to_rule: int
    margin: float = 0.0

    def __post_init__(self):
        if self.from_rule == self.to_rule:
            raise ValidationError("a dominance hypothesis needs two distinct rules")


@dataclass(frozen=True)
class RankedHypothesis:
    """A hypothesis with its planning-sample ordering score.

    ``usable`` is False when the planning half could not score it (fewer
    than two disagreeing pairs, or degenerate moments); such hypotheses sort
    last.
    """

    hypothesis: Hypothesis
    score: float
    usable: bool


@dataclass(frozen=True)
class HypothesisRecord:
    """Outcome of one hypothesis inside a selection run."""

    hypothesis: Hypothesis
    tested: bool
    rejected: bool
    level: float
    statistic: float | None = None
    p_value: float | None = None
    error: str | None = None
    score: float | None = None


@dataclass(frozen=True)
class SelectionPlan:
    """Configuration of a selection run."""

    goal: Goal = "positive"
    method: Method = "bonferroni"
    split_fraction: float = 0.5
    seed: int = 0
    control: int = 0
    hypotheses: tuple[Hypothesis, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "method", canonical_method(self.method))
        if self.goal not in ("order", "maximal", "positive"):
            raise ValidationError(f"unknown goal {self.goal!r}")


@dataclass(frozen=True)
class SelectionResult:
    """Rejected orderings plus per-hypothesis records and derived rule sets."""

    order_set: frozenset[tuple[int, int]]
    records: tuple[HypothesisRecord, ...]
    rule_count: int
    gamma: float
    alpha: float
    delta: float
    goal: str = ""
    method: str = ""
    maximal_set: frozenset[int] | None = None
    positive_set: frozenset[int] | None = None
    planning_ids: tuple | None = None
    testing_ids: tuple | None = None


def pairwise_family(rule_count: int, margin: float = 0.0) -> tuple[Hypothesis, ...]:
    """Every ordered pair of distinct rules, lexicographic."""
    return tuple(
        Hypothesis(i, j, margin)
        for i in range(rule_count)
        for j in range(rule_count)
        if i != j
    )


def control_family(rule_count: int, control: int = 0, margin: float = 0.0) -> tuple[Hypothesis, ...]:
    """The hypotheses "control is not dominated by rule i", i != control."""
    return tuple(Hypothesis(control, j, margin) for j in range(rule_count) if j != control)


def split_sample(sample: PairedSample, fraction: float, seed: int) -> tuple[PairedSample, PairedSample]:
    """Random disjoint planning/testing partition, reproducible from the seed."""
    if not 0.0 < fraction < 1.0:
        raise ValidationError(f"split fraction must lie in (0, 1), got {fraction!r}")
    if sample.n < 2:
        raise TooFewPairs("cannot split fewer than 2 pairs")
    k = int(math.floor(fraction * sample.n + 0.5))
    if k == 0 or k == sample.n:
        raise TooFewPairs(f"split of {sample.n} pairs at fraction {fraction} leaves one side empty")
    perm = np.random.default_rng(seed).permutation(sample.n)
    return sample.subset(np.sort(perm[:k])), sample.subset(np.sort(perm[k:]))


def order_hypotheses(
    planning: PairedSample,
    hypotheses: Sequence[Hypothesis],
    gamma: float,
    alpha: float,
    testing_count: int,
    mode: Literal["power", "value"],
) -> list[RankedHypothesis]:
    """Sort hypotheses by their planning-sample promise, best first.

    Power mode scores each hypothesis by the approximate rejection
    probability in the testing sample, sized by the hypothesis's expected
    share of disagreeing pairs. Value mode scores by the plug-in value
    difference mean(signed_d) * m / n at gamma = 1. Ties (and unusable
    hypotheses, placed last) fall back to (from_rule, to_rule) order.
    """
    if mode not in ("power", "value"):
        raise ValidationError(f"unknown ordering mode {mode!r}")
    ranked = []
    for h in hypotheses:
        score, usable = -math.inf, False
        try:
            frame = build_comparison_frame(planning, h.from_rule, h.to_rule)
            if frame.m < 2:
                raise TooFewPairs("planning frame has a single disagreeing pair")
            if mode == "power":
                params = asymptotic_params(moment_summary(frame))
                count = max(1, int(round(testing_count * frame.m / frame.n)))
                score = approx_power(params, count, gamma, alpha)
            else:
                score = float(frame.signed_d.mean()) * frame.m / frame.n
            usable = math.isfinite(score)
        except (IdenticalRules, TooFewPairs, ZeroDenominator, DegenerateVariance):
            pass
        ranked.append(RankedHypothesis(h, score if usable else -math.inf, usable))
    ranked.sort(
        key=lambda r: (
            not r.usable,
            -r.score,
            r.hypothesis.from_rule,
            r.hypothesis.to_rule,
        )
    )
    return ranked


def prune_for_max(ordered: Sequence[Hypothesis]) -> list[Hypothesis]:
    """Keep only the first hypothesis per source rule, preserving order."""
    seen: set[int] = set()
    kept = []
    for h in ordered:
        if h.from_rule not in seen:
            seen.add(h.from_rule)
            kept.append(h)
    return kept


def fixed_sequence_test(
    testing: PairedSample,
    ordered: Sequence[Hypothesis],
    params: SensitivityParams,
) -> SelectionResult:
    """Test hypotheses in order at full alpha; stop at the first non-rejection.

    Degenerate frames (identical rules, too few pairs, zero variance) count
    as conservative non-rejections and stop the sequence. Hypotheses after
    the stop are recorded untested.
    """
    if not ordered:
        raise ValidationError("fixed-sequence testing needs at least one hypothesis")
    records: list[HypothesisRecord] = []
    rejected: set[tuple[int, int]] = set()
    stopped = False
    for h in ordered:
        if stopped:
            records.append(HypothesisRecord(h, tested=False, rejected=False, level=params.alpha))
            continue
        try:
            frame = build_comparison_frame(testing, h.from_rule, h.to_rule)
            res = test_frame(frame, dataclasses.replace(params, delta=h.margin))
        except (IdenticalRules, TooFewPairs, DegenerateVariance) as exc:
            records.append(
                HypothesisRecord(
                    h,
                    tested=True,
                    rejected=False,
                    level=params.alpha,
                    error=type(exc).__name__,
                )
            )
            stopped = True
            continue
        records.append(
            HypothesisRecord(
                h,
                tested=True,
                rejected=res.rejected,
                level=params.alpha,
                statistic=res.statistic,
                p_value=res.p_value,
            )
        )
        if res.rejected:
            rejected.add((h.from_rule, h.to_rule))
        else:
            stopped = True
    return SelectionResult(
        order_set=frozenset(rejected),
        records=tuple(records),
        rule_count=testing.rule_count,
        gamma=params.gamma,
        alpha=params.alpha,
        delta=params.delta,
    )


def bonferroni_test(
    sample: PairedSample,
    hypotheses: Sequence[Hypothesis],
    params: SensitivityParams,
) -> SelectionResult:
    """Test every hypothesis on the full sample at level alpha / family size."""
    if not hypotheses:
        raise ValidationError("Bonferroni testing needs at least one hypothesis")
    level = params.alpha / len(hypotheses)
    records: list[HypothesisRecord] = []
    rejected: set[tuple[int, int]] = set()
    for h in hypotheses:
        try:
            frame = build_comparison_frame(sample, h.from_rule, h.to_rule)
            res = test_frame(frame, dataclasses.replace(params, alpha=level, delta=h.margin))
        except (IdenticalRules, TooFewPairs, DegenerateVariance) as exc:
            records.append(
                HypothesisRecord(h, tested=True, rejected=False, level=level, error=type(exc).__name__)
            )
            continue
        records.append(
            HypothesisRecord(
                h,
                tested=True,
                rejected=res.rejected,
                level=level,
                statistic=res.statistic,
                p_value=res.p_value,
            )
        )
        if res.rejected:
            rejected.add((h.from_rule, h.to_rule))
    return SelectionResult(
        order_set=frozenset(rejected),
        records=tuple(records),
        rule_count=sample.rule_count,
        gamma=params.gamma,
        alpha=params.alpha,
        delta=params.delta,
    )


def select_maximal(result: SelectionResult, rule_count: int) -> frozenset[int]:
    """Rules with no affirmed dominator: the Hasse-diagram leaves."""
    return undominated(result.order_set, rule_count)


def run_selection(sample: PairedSample, params: SensitivityParams, plan: SelectionPlan) -> SelectionResult:
    """Dispatch one full selection run and attach goal-derived sets."""
    if plan.hypotheses is not None:
        family: Sequence[Hypothesis] = plan.hypotheses
    elif plan.goal == "positive":
        family = control_family(sample.rule_count, plan.control, params.delta)
    else:
        family = pairwise_family(sample.rule_count, params.delta)
    planning_ids = testing_ids = None
    if plan.method == "bonferroni":
        result = bonferroni_test(sample, family, params)
    else:
        planning, testing = split_sample(sample, plan.split_fraction, plan.seed)
        ranked = order_hypotheses(planning, family, params.gamma, params.alpha, testing.n, plan.method)
        scores = {r.hypothesis: r.score for r in ranked}
        sequence = [r.hypothesis for r in ranked]
        if plan.goal == "maximal":
            sequence = prune_for_max(sequence)
        result = fixed_sequence_test(testing, sequence, params)
        result = dataclasses.replace(
            result,
            records=tuple(
                dataclasses.replace(rec, score=scores.get(rec.hypothesis))
                for rec in result.records
            ),
        )
        planning_ids = tuple(planning.pair_ids.tolist())
        testing_ids = tuple(testing.pair_ids.tolist())
    extra: dict = {}
    if plan.goal in ("order", "maximal"):
        extra["maximal_set"] = select_maximal(result, sample.rule_count)
    if plan.goal == "positive":
        extra["positive_set"] = frozenset(
            j for i, j in result.order_set if i == plan.control
        )
    return dataclasses.replace(
        result,
        goal=plan.goal,
        method=plan.method,
        rule_count=sample.rule_count,
        planning_ids=planning_ids,
        testing_ids=testing_ids,
        **extra,
    )


def select_positive(sample: PairedSample, params: SensitivityParams, plan: SelectionPlan) -> frozenset[int]:
    """Rules affirmed to dominate the control rule by the configured margin."""
    if plan.goal != "positive":
        plan = dataclasses.replace(plan, goal="positive")
    result = run_selection(sample, params, plan)
    assert result.positive_set is not None
    return result.positive_set
