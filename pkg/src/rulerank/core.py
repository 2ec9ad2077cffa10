"""Matched-pair data containers and the rule-comparison reduction.

A study is stored as n matched pairs. Each pair carries one
treated-minus-control outcome difference and one 0/1 decision per candidate
treatment rule (the two units of a pair share covariates, so a rule decides
once per pair). Comparing two rules reduces to a one-sample problem on the
pairs where the rules disagree, with the sign of the difference flipped on
pairs where the first rule treats and the second does not.

The confounding model is the bounded-odds model: within a matched pair the
odds of the observed treatment assignment are bounded by gamma >= 1, with
gamma = 1 meaning randomization. kappa = (gamma - 1) / (gamma + 1) is the
same bound on the [0, 1) scale; the worst-case bias of a pair difference D
is kappa * |D|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    IdenticalRules,
    InvalidGamma,
    InvalidKappa,
    InvalidRule,
    ValidationError,
)


def gamma_to_kappa(gamma: float) -> float:
    """Map a confounding bound gamma in [1, inf] to kappa = (gamma-1)/(gamma+1)."""
    if math.isnan(gamma) or gamma < 1:
        raise InvalidGamma(f"gamma must be >= 1, got {gamma!r}")
    if math.isinf(gamma):
        return 1.0
    return (gamma - 1.0) / (gamma + 1.0)


def kappa_to_gamma(kappa: float) -> float:
    """Inverse transform: kappa in [0, 1) to gamma = (1+kappa)/(1-kappa)."""
    if math.isnan(kappa) or not 0.0 <= kappa < 1.0:
        raise InvalidKappa(f"kappa must lie in [0, 1), got {kappa!r}")
    return (1.0 + kappa) / (1.0 - kappa)


@dataclass(frozen=True)
class SensitivityParams:
    """Analysis knobs: confounding bound, test level, and dominance margin.

    delta is in outcome units and is interpreted as a margin on the value
    difference of two rules over the whole sample.
    """

    gamma: float = 1.0
    alpha: float = 0.05
    delta: float = 0.0

    def __post_init__(self):
        if math.isnan(self.gamma) or self.gamma < 1:
            raise InvalidGamma(f"gamma must be >= 1, got {self.gamma!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if math.isnan(self.delta) or self.delta < 0:
            raise ValidationError(f"delta must be >= 0, got {self.delta!r}")

    @property
    def kappa(self) -> float:
        return gamma_to_kappa(self.gamma)


@dataclass(frozen=True)
class PairedSample:
    """n matched pairs: outcome differences plus a per-pair rule decision table.

    ``rules[p, k]`` is 1 when rule k treats (both units of) pair p. Column 0
    is the designated control rule by convention; engines take the control
    index explicitly so the convention can be overridden.
    """

    pair_ids: np.ndarray
    d: np.ndarray
    rules: np.ndarray

    def __post_init__(self):
        # own copies throughout so freezing them never touches caller arrays
        ids = np.array(self.pair_ids)
        d = np.array(self.d, dtype=np.float64, order="C")
        rules_raw = np.asarray(self.rules)
        if d.ndim != 1 or ids.ndim != 1:
            raise ValidationError("pair_ids and d must be one-dimensional")
        if rules_raw.ndim != 2:
            raise ValidationError("rules must be a 2-d table (pairs x rules)")
        n = d.shape[0]
        if n < 1:
            raise ValidationError("a sample needs at least one pair")
        if ids.shape[0] != n or rules_raw.shape[0] != n:
            raise ValidationError("pair_ids, d, and rules must agree on the pair count")
        if rules_raw.size and not np.isin(rules_raw, (0, 1)).all():
            raise ValidationError("rule decisions must be exactly 0 or 1")
        rules = np.array(rules_raw, dtype=np.uint8, order="C")
        for arr in (ids, d, rules):
            arr.setflags(write=False)
        object.__setattr__(self, "pair_ids", ids)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "rules", rules)

    @property
    def n(self) -> int:
        return self.d.shape[0]

    @property
    def rule_count(self) -> int:
        return self.rules.shape[1]

    def subset(self, indices: np.ndarray) -> "PairedSample":
        """A new sample restricted to the given pair positions (order kept)."""
        idx = np.asarray(indices)
        return PairedSample(self.pair_ids[idx], self.d[idx], self.rules[idx])


@dataclass(frozen=True)
class ComparisonFrame:
    """Signed differences for one ordered rule pair, on disagreeing pairs only.

    ``signed_d[p] = d[p] * (r_j(p) - r_i(p))`` over the m pairs where the two
    rules disagree; n is the total pair count of the source sample.
    """

    signed_d: np.ndarray
    m: int
    n: int
    rule_pair: tuple[int, int]


def build_comparison_frame(sample: PairedSample, rule_i: int, rule_j: int) -> ComparisonFrame:
    """Reduce a rule pair to the signed-difference vector driving every test.

    Raises IdenticalRules when the two columns agree on all pairs and
    InvalidRule for bad indices.
    """
    r = sample.rule_count
    for k in (rule_i, rule_j):
        if not 0 <= k < r:
            raise InvalidRule(f"rule index {k} out of range for {r} rules")
    if rule_i == rule_j:
        raise InvalidRule(f"rule indices must be distinct, got {rule_i} twice")
    sign = sample.rules[:, rule_j].astype(np.int8) - sample.rules[:, rule_i].astype(np.int8)
    mask = sign != 0
    m = int(np.count_nonzero(mask))
    if m == 0:
        raise IdenticalRules(f"rules {rule_i} and {rule_j} agree on every pair")
    signed = np.ascontiguousarray(sample.d[mask] * sign[mask])
    signed.setflags(write=False)
    return ComparisonFrame(signed_d=signed, m=m, n=sample.n, rule_pair=(rule_i, rule_j))
