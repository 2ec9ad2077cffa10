"""Exception types shared across the package."""


class RuleRankError(Exception):
    """Base class for every error raised by this package."""


class InvalidRule(RuleRankError):
    """A rule index is out of range or the comparison is ill-posed."""


class IdenticalRules(RuleRankError):
    """The two rules agree on every pair; there is nothing to compare."""


class InvalidGamma(RuleRankError):
    """Confounding bound outside [1, inf)."""


class InvalidKappa(RuleRankError):
    """Transformed confounding bound outside [0, 1)."""


class InvalidAmplification(RuleRankError):
    """Amplification requested with a treatment-odds bound not exceeding gamma."""


class TooFewPairs(RuleRankError):
    """Fewer pairs than the operation needs."""


class DegenerateVariance(RuleRankError):
    """Sample variance is zero, so a studentized statistic is undefined."""


class ZeroDenominator(RuleRankError):
    """A moment in a denominator is zero (all differences vanish)."""


class CycleDetected(RuleRankError):
    """A dominance relation set implies a cycle; asymmetry is violated."""


class ValidationError(RuleRankError):
    """Input data violates a schema or domain constraint."""


class ParseError(RuleRankError):
    """A file cell could not be parsed; carries row/column context."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)
        self.row = row
        self.column = column


class NoMatches(RuleRankError):
    """Greedy pair matching produced zero pairs."""
