"""Order-set algebra: closure, Hasse reduction, leaves, and DOT export.

An order set collects affirmed dominance relations (i, j), read "rule i is
dominated by rule j". Closure adds every relation implied by a directed
chain; the family-wise error guarantee carries over because a false implied
relation requires a false link on its chain. The Hasse diagram is the
minimal edge set with the same closure. Rule counts are small, so plain
O(V^3) reachability is used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CycleDetected, ValidationError

Relation = tuple[int, int]


@dataclass(frozen=True)
class OrderSet:
    """A set of affirmed dominance relations over ``rule_count`` rules."""

    relations: frozenset[Relation]
    rule_count: int
    rule_labels: tuple[str, ...] | None = None
    gamma: float | None = None

    def __post_init__(self):
        relations = frozenset((int(i), int(j)) for i, j in self.relations)
        object.__setattr__(self, "relations", relations)
        if self.rule_count < 1:
            raise ValidationError("rule_count must be >= 1")
        for i, j in relations:
            if i == j:
                raise ValidationError(f"relation ({i}, {j}) is reflexive")
            if not (0 <= i < self.rule_count and 0 <= j < self.rule_count):
                raise ValidationError(f"relation ({i}, {j}) outside 0..{self.rule_count - 1}")
        if self.rule_labels is not None and len(self.rule_labels) != self.rule_count:
            raise ValidationError("rule_labels length must equal rule_count")

    def labels(self) -> tuple[str, ...]:
        if self.rule_labels is not None:
            return tuple(self.rule_labels)
        return tuple(f"r{i}" for i in range(self.rule_count))


@dataclass(frozen=True)
class HasseDiagram:
    """Transitive reduction of a closed order set, ready for rendering.

    ``relation_count`` is the size of the closure the edges stand for.
    """

    edges: frozenset[Relation]
    nodes: tuple[str, ...]
    gamma: float | None = None
    relation_count: int = 0


def _reach_matrix(o: OrderSet) -> np.ndarray:
    n = o.rule_count
    reach = np.zeros((n, n), dtype=bool)
    for i, j in o.relations:
        reach[i, j] = True
    for k in range(n):
        reach |= reach[:, k : k + 1] & reach[k : k + 1, :]
    if reach.diagonal().any():
        cyclic = [int(i) for i in np.flatnonzero(reach.diagonal())]
        raise CycleDetected(f"relations imply a cycle through rules {cyclic}")
    return reach


def transitive_closure(o: OrderSet) -> OrderSet:
    """All relations reachable through directed chains; errors on cycles."""
    reach = _reach_matrix(o)
    closed = frozenset((int(i), int(j)) for i, j in np.argwhere(reach))
    return OrderSet(closed, o.rule_count, o.rule_labels, o.gamma)


def hasse_edges(o: OrderSet) -> HasseDiagram:
    """Minimal edge set whose closure reproduces the closure of ``o``."""
    reach = _reach_matrix(o)
    edges = set()
    for i, j in np.argwhere(reach):
        if not np.any(reach[i] & reach[:, j]):
            edges.add((int(i), int(j)))
    return HasseDiagram(
        edges=frozenset(edges),
        nodes=o.labels(),
        gamma=o.gamma,
        relation_count=int(reach.sum()),
    )


def leaves(o: OrderSet, rule_count: int | None = None) -> frozenset[int]:
    """Rules with no outgoing relation: not dominated by anything affirmed."""
    n = o.rule_count if rule_count is None else rule_count
    return undominated(o.relations, n)


def undominated(relations, rule_count: int) -> frozenset[int]:
    """{i : no (i, j) in relations}; shared by leaves and maximal-rule selection."""
    sources = {i for i, _ in relations}
    return frozenset(i for i in range(rule_count) if i not in sources)


def to_dot(h: HasseDiagram) -> str:
    """Deterministic DOT rendering; edges point from dominated to dominating."""
    title = f"relations={h.relation_count}"
    if h.gamma is not None:
        title = f"gamma={h.gamma:g} {title}"
    lines = [
        "digraph dominance {",
        f'  label="{title}";',
        "  rankdir=BT;",
    ]
    for name in sorted(h.nodes):
        lines.append(f'  "{name}";')
    for i, j in sorted(h.edges):
        lines.append(f'  "{h.nodes[i]}" -> "{h.nodes[j]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
