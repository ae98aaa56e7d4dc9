"""
Improvement Model

Finite instance space, improvement graph, ordered label space, explicit
hypothesis table and version-space algebra.

Nodes, labels and hypotheses are dense integer indices; names only live at
the I/O boundary. A version space is a bitmask over the shared hypothesis
table (bit i set <=> hypothesis i is a member).
"""

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from core.constants import GAIN_TOLERANCE
from core.errors import DomainError

UNDEFINED_LABEL = -1


def iter_members(mask: int) -> Iterator[int]:
    """Indices of the set bits of a mask, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def lowest_member(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


# ============================================================
# IMPROVEMENT GRAPH
# ============================================================

@dataclass(frozen=True)
class ImprovementGraph:
    """
    Directed graph with self-loops; adjacency[x] is Δ(x) in ascending
    node order, costs[x] is aligned with it.
    """

    nodes: Tuple[str, ...]
    adjacency: Tuple[Tuple[int, ...], ...]
    costs: Tuple[Tuple[float, ...], ...]
    _cost_index: Dict[Tuple[int, int], float] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self):
        index = {}
        for x, (nbrs, cs) in enumerate(zip(self.adjacency, self.costs)):
            for v, c in zip(nbrs, cs):
                index.setdefault((x, v), float(c))
        object.__setattr__(self, "_cost_index", index)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def max_degree(self) -> int:
        """Δ_G: largest improvement set, self-loop included."""
        return max((len(nbrs) for nbrs in self.adjacency), default=0)

    @property
    def is_weighted(self) -> bool:
        return any(c != 0.0 for c in self._cost_index.values())

    def neighbors(self, x: int) -> Tuple[int, ...]:
        return self.adjacency[x]

    def others(self, x: int) -> Tuple[int, ...]:
        """Δ(x) without x itself."""
        return tuple(v for v in self.adjacency[x] if v != x)

    def has_edge(self, x: int, v: int) -> bool:
        return (x, v) in self._cost_index

    def cost(self, x: int, v: int) -> float:
        try:
            return self._cost_index[(x, v)]
        except KeyError:
            raise DomainError(
                f"'{self.nodes[v]}' is not in the improvement set of '{self.nodes[x]}'"
            ) from None

    def index(self, name: str) -> int:
        try:
            return self.nodes.index(name)
        except ValueError:
            raise DomainError(f"Unknown node: '{name}'") from None

    def edges(self) -> Iterator[Tuple[int, int, float]]:
        for x, (nbrs, cs) in enumerate(zip(self.adjacency, self.costs)):
            for v, c in zip(nbrs, cs):
                yield x, v, c

    def unweighted(self) -> "ImprovementGraph":
        return ImprovementGraph(
            nodes=self.nodes,
            adjacency=self.adjacency,
            costs=tuple(tuple(0.0 for _ in nbrs) for nbrs in self.adjacency),
        )

    def self_loops_only(self) -> "ImprovementGraph":
        return ImprovementGraph(
            nodes=self.nodes,
            adjacency=tuple((x,) for x in range(self.n)),
            costs=tuple((0.0,) for _ in range(self.n)),
        )

    @classmethod
    def from_edges(cls, nodes, edges) -> "ImprovementGraph":
        """
        Build from (x, v, cost) index triples. Missing self-loops are
        added with cost 0; repeated edges keep their first cost.
        """
        n = len(nodes)
        table: List[Dict[int, float]] = [dict() for _ in range(n)]
        for x, v, c in edges:
            table[x].setdefault(v, float(c))
        for x in range(n):
            table[x].setdefault(x, 0.0)

        adjacency = tuple(tuple(sorted(row)) for row in table)
        costs = tuple(
            tuple(table[x][v] for v in adjacency[x]) for x in range(n)
        )
        return cls(nodes=tuple(nodes), adjacency=adjacency, costs=costs)


# ============================================================
# LABEL SPACE
# ============================================================

@dataclass(frozen=True)
class LabelSpace:
    """Labels z_1 < … < z_k; index 0 is the bottom label z_1."""

    names: Tuple[str, ...]
    values: Tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.names)

    @property
    def bottom(self) -> int:
        return 0

    @property
    def top(self) -> int:
        return self.k - 1

    def value(self, y: int) -> float:
        return self.values[y]

    def gap(self, y: int) -> float:
        """val(y) − val(z_1)."""
        return self.values[y] - self.values[0]

    def unmotivating(self, cost: float) -> frozenset:
        """
        Y_{x,v} for an edge of the given cost: labels whose value gain over
        z_1 never pays for the move. Equality counts as unmotivating since
        the agent only moves on strictly positive gain.
        """
        return frozenset(
            y for y in range(self.k) if self.gap(y) - cost <= GAIN_TOLERANCE
        )

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DomainError(f"Unknown label: '{name}'") from None

    @classmethod
    def binary(cls) -> "LabelSpace":
        return cls(names=("0", "1"), values=(0.0, 1.0))


# ============================================================
# HYPOTHESIS CLASS & VERSION SPACES
# ============================================================

@dataclass(eq=False)
class HypothesisClass:
    """
    Explicit finite class: table[i, x] is the label index hypothesis i
    assigns to node x (UNDEFINED_LABEL when the source left it out).
    """

    names: Tuple[str, ...]
    table: np.ndarray
    k: int

    def __post_init__(self):
        self.table = np.asarray(self.table, dtype=np.int16)
        self.table.setflags(write=False)
        m, n = self.table.shape

        # masks[x][y] = members labeling node x with y
        masks = []
        for x in range(n):
            column = self.table[:, x]
            masks.append(tuple(
                sum(1 << int(i) for i in np.flatnonzero(column == y))
                for y in range(self.k)
            ))
        self.label_masks: Tuple[Tuple[int, ...], ...] = tuple(masks)
        self.full_mask = (1 << m) - 1

    def __len__(self) -> int:
        return self.table.shape[0]

    @property
    def n_nodes(self) -> int:
        return self.table.shape[1]

    def label(self, i: int, x: int) -> int:
        return int(self.table[i, x])

    def mask_of(self, x: int, y: int) -> int:
        return self.label_masks[x][y]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DomainError(f"Unknown hypothesis: '{name}'") from None


@dataclass(frozen=True)
class VersionSpace:
    hclass: HypothesisClass
    mask: int

    def restrict(self, x: int, y: int) -> "VersionSpace":
        """{h in V : h(x) = y}"""
        return VersionSpace(self.hclass, self.mask & self.hclass.mask_of(x, y))

    def restrict_not(self, x: int, y: int) -> "VersionSpace":
        """{h in V : h(x) != y}"""
        return VersionSpace(self.hclass, self.mask & ~self.hclass.mask_of(x, y))

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __iter__(self) -> Iterator[int]:
        return iter_members(self.mask)

    def __contains__(self, i: int) -> bool:
        return bool(self.mask >> i & 1)

    @property
    def is_empty(self) -> bool:
        return self.mask == 0

    def labels_on(self, x: int) -> Tuple[int, ...]:
        """Labels some member produces on x."""
        return tuple(
            y for y in range(self.hclass.k)
            if self.mask & self.hclass.mask_of(x, y)
        )

    def issubset(self, other: "VersionSpace") -> bool:
        return self.mask & ~other.mask == 0


# ============================================================
# INSTANCE
# ============================================================

@dataclass(eq=False)
class Instance:
    """A graph, a label space and a class over the same nodes."""

    graph: ImprovementGraph
    labels: LabelSpace
    hypotheses: HypothesisClass
    name: str = "instance"

    def full(self) -> VersionSpace:
        return VersionSpace(self.hypotheses, self.hypotheses.full_mask)

    def version_space(self, mask: int) -> VersionSpace:
        return VersionSpace(self.hypotheses, mask)

    def for_setting(self, setting: str) -> "Instance":
        """
        The instance a game in this setting is played on: the pruned
        weighted graph for weighted-full, the cost-free graph otherwise.
        """
        if setting == "weighted-full":
            graph = prune_useless_edges(self.graph, self.labels)
        elif setting in ("binary", "multiclass-full", "multiclass-bandit"):
            if setting == "binary" and self.labels.k != 2:
                raise DomainError(
                    f"setting 'binary' needs exactly 2 labels, got {self.labels.k}"
                )
            graph = self.graph.unweighted()
        else:
            raise DomainError(f"Unknown setting: '{setting}'")

        if graph == self.graph:
            return self
        return Instance(graph, self.labels, self.hypotheses, self.name)

    def with_graph(self, graph: ImprovementGraph) -> "Instance":
        return Instance(graph, self.labels, self.hypotheses, self.name)


# ============================================================
# VALIDATION
# ============================================================

@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[str, ...]
    pruned_graph: Optional[ImprovementGraph]
    pruned_edges: Tuple[Tuple[int, int], ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _graph_violations(graph: ImprovementGraph) -> List[str]:
    out = []
    for x, name in enumerate(graph.nodes):
        nbrs = graph.adjacency[x]
        if x not in nbrs:
            out.append(f"missing self-loop at '{name}'")
        elif graph.cost(x, x) != 0.0:
            out.append(f"self-loop cost nonzero at '{name}'")
        if len(set(nbrs)) != len(nbrs):
            out.append(f"duplicate neighbor in Δ('{name}')")
        for v, c in zip(nbrs, graph.costs[x]):
            if not 0 <= v < graph.n:
                out.append(f"undeclared neighbor {v} of '{name}'")
            if c < 0:
                out.append(f"negative cost on edge ('{name}', {v})")
    return out


def _label_violations(labels: LabelSpace) -> List[str]:
    out = []
    if labels.k < 2:
        out.append(f"label space needs at least 2 labels, got {labels.k}")
    if any(a >= b for a, b in zip(labels.values, labels.values[1:])):
        out.append("non-monotone label values")
    return out


def _class_violations(graph, labels, hclass) -> List[str]:
    out = []
    if len(hclass) == 0:
        out.append("empty hypothesis class")
        return out
    if hclass.n_nodes != graph.n:
        out.append(
            f"hypothesis table covers {hclass.n_nodes} nodes, graph has {graph.n}"
        )
        return out
    for i, name in enumerate(hclass.names):
        row = hclass.table[i]
        missing = [graph.nodes[x] for x in np.flatnonzero(row == UNDEFINED_LABEL)]
        if missing:
            out.append(f"hypothesis '{name}' undefined on {missing}")
        if np.any(row >= labels.k) or np.any(row < UNDEFINED_LABEL):
            out.append(f"hypothesis '{name}' uses an unknown label")
    return out


def validate(graph: ImprovementGraph, labels: LabelSpace, hclass: HypothesisClass) -> ValidationReport:
    """
    Report-style check of the model assumptions. The pruned graph is
    attached whenever the graph and labels themselves are sound.
    """
    graph_issues = _graph_violations(graph)
    label_issues = _label_violations(labels)
    violations = graph_issues + label_issues + _class_violations(graph, labels, hclass)

    pruned, removed = None, ()
    if not graph_issues and not label_issues:
        pruned = prune_useless_edges(graph, labels)
        removed = tuple(
            (x, v) for x, v, _ in graph.edges() if not pruned.has_edge(x, v)
        )
    return ValidationReport(tuple(violations), pruned, removed)


def prune_useless_edges(graph: ImprovementGraph, labels: LabelSpace) -> ImprovementGraph:
    """Drop non-self edges whose cost is never paid for: val(z_k) − val(z_1) ≤ cost."""
    top_gap = labels.gap(labels.top)
    kept = [
        (x, v, c) for x, v, c in graph.edges()
        if x == v or top_gap - c > GAIN_TOLERANCE
    ]
    pruned = ImprovementGraph.from_edges(graph.nodes, kept)
    return graph if pruned == graph else pruned
