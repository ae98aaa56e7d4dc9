"""
Shattered Trees

Brute-force enumeration of the five tree families, used as the oracle the
dimension recursions are checked against and as the script the lower-bound
adversary follows.

A tree node at x carries an edge set; an edge (u, y) restricts the version
space to h(u) = y, or to h(u) != y for bandit trees. A tree is shattered when
every root-to-leaf branch leaves a nonempty version space. Depth is counted
in edges along the shortest branch.
"""

import logging
from dataclasses import dataclass
from itertools import combinations, product
from typing import Dict, Iterator, Optional, Tuple

from core.constants import MAX_ENUMERATION_DEPTH, MAX_ENUMERATION_NODES
from core.dimensions import DimensionKind, calculator_for
from core.errors import ResourceLimitError
from core.model import Instance, VersionSpace

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TreeEdge:
    node: int
    label: int


@dataclass(frozen=True)
class ShatteredTree:
    node: Optional[int] = None
    edges: Tuple[TreeEdge, ...] = ()
    children: Tuple["ShatteredTree", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return self.node is None

    @property
    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + min(child.depth for child in self.children)

    def child(self, edge: TreeEdge) -> "ShatteredTree":
        return self.children[self.edges.index(edge)]


LEAF = ShatteredTree()


def excludes(kind) -> bool:
    """Bandit trees shatter by disagreement."""
    return DimensionKind(kind) is DimensionKind.BIL


def restrict_mask(instance: Instance, kind, mask: int, edge: TreeEdge) -> int:
    label_mask = instance.hypotheses.mask_of(edge.node, edge.label)
    return mask & ~label_mask if excludes(kind) else mask & label_mask


# ============================================================
# EDGE SETS PER TREE FAMILY
# ============================================================

def edge_sets(instance: Instance, kind, x: int) -> Iterator[Tuple[TreeEdge, ...]]:
    """Every edge set a tree node at x may carry in the given family."""
    kind = DimensionKind(kind)
    calc = calculator_for(instance)
    graph = calc.graph_for(kind)
    k = instance.labels.k

    if kind is DimensionKind.LITTLESTONE:
        for a, b in combinations(range(k), 2):
            yield (TreeEdge(x, a), TreeEdge(x, b))
        return

    if kind is DimensionKind.IL_BINARY:
        yield (TreeEdge(x, 1),) + tuple(TreeEdge(v, 0) for v in graph.neighbors(x))
        return

    if kind is DimensionKind.BIL:
        yield tuple(TreeEdge(x, y) for y in range(k)) + tuple(
            TreeEdge(v, y) for v in graph.others(x) for y in range(1, k)
        )
        return

    # Multiclass and weighted: two labels on x, per neighbor a single
    # unmotivating label or two motivating ones
    options = []
    for v in graph.others(x):
        low = calc.unmotivating(kind, x, v)
        high = [y for y in range(k) if y not in low]
        options.append(
            [(TreeEdge(v, y),) for y in sorted(low)]
            + [(TreeEdge(v, a), TreeEdge(v, b)) for a, b in combinations(high, 2)]
        )

    for a, b in combinations(range(k), 2):
        for choice in product(*options):
            yield (TreeEdge(x, a), TreeEdge(x, b)) + tuple(e for group in choice for e in group)


# ============================================================
# ENUMERATION
# ============================================================

def _check_limits(instance: Instance, depth: int) -> None:
    if depth > MAX_ENUMERATION_DEPTH:
        raise ResourceLimitError(
            f"tree enumeration limited to depth {MAX_ENUMERATION_DEPTH}, asked {depth}"
        )
    if instance.graph.n > MAX_ENUMERATION_NODES:
        raise ResourceLimitError(
            f"tree enumeration limited to {MAX_ENUMERATION_NODES} nodes, got {instance.graph.n}"
        )


def enumerate_shattered_tree(
    instance: Instance,
    kind,
    depth: int,
    vs: Optional[VersionSpace] = None,
) -> Optional[ShatteredTree]:
    """
    Exhaustively search the family for a tree of the given depth shattered
    by vs (the full class by default). Returns a witness or None.
    """
    kind = DimensionKind(kind)
    _check_limits(instance, depth)
    n = instance.graph.n
    memo: Dict[Tuple[int, int], Optional[ShatteredTree]] = {}

    def search(mask: int, d: int) -> Optional[ShatteredTree]:
        if mask == 0:
            return None
        if d == 0:
            return LEAF
        key = (mask, d)
        if key in memo:
            return memo[key]

        found = None
        for x in range(n):
            for edges in edge_sets(instance, kind, x):
                children = []
                for edge in edges:
                    sub = search(restrict_mask(instance, kind, mask, edge), d - 1)
                    if sub is None:
                        break
                    children.append(sub)
                else:
                    found = ShatteredTree(x, edges, tuple(children))
                    break
            if found is not None:
                break

        memo[key] = found
        return found

    mask = (vs if vs is not None else instance.full()).mask
    witness = search(mask, depth)
    log.debug("enumerate %s depth=%d -> %s", kind.value, depth, witness is not None)
    return witness


def witness_root(
    instance: Instance,
    kind,
    mask: int,
    depth: int,
) -> Optional[Tuple[int, Tuple[TreeEdge, ...]]]:
    """
    Root node and edge set of a depth-`depth` tree shattered by mask, read
    off the dimension recursion instead of enumerated. None if there is none.
    """
    kind = DimensionKind(kind)
    if mask == 0 or depth <= 0:
        return None
    calc = calculator_for(instance)
    for x in range(instance.graph.n):
        for edges in edge_sets(instance, kind, x):
            if all(
                calc.dimension(kind, restrict_mask(instance, kind, mask, edge)) >= depth - 1
                for edge in edges
            ):
                return x, edges
    return None


def max_shattered_depth(instance: Instance, kind, vs: Optional[VersionSpace] = None) -> int:
    """Deepest depth with a witness, by enumeration alone; -1 for an empty class."""
    depth = -1
    while depth < MAX_ENUMERATION_DEPTH:
        if enumerate_shattered_tree(instance, kind, depth + 1, vs) is None:
            return depth
        depth += 1
    raise ResourceLimitError(f"class shatters depth {depth}, past the enumeration limit")


def is_shattered(
    instance: Instance,
    kind,
    tree: ShatteredTree,
    vs: Optional[VersionSpace] = None,
) -> bool:
    """Check a tree branch by branch: family structure and nonempty leaves."""
    kind = DimensionKind(kind)

    def walk(node: ShatteredTree, mask: int) -> bool:
        if mask == 0:
            return False
        if node.is_leaf:
            return True
        if node.edges not in set(edge_sets(instance, kind, node.node)):
            return False
        if len(node.children) != len(node.edges):
            return False
        return all(
            walk(child, restrict_mask(instance, kind, mask, edge))
            for edge, child in zip(node.edges, node.children)
        )

    return walk(tree, (vs if vs is not None else instance.full()).mask)


# ============================================================
# SERIALIZATION
# ============================================================

def tree_to_dict(tree: ShatteredTree, instance: Instance, kind) -> dict:
    relation = "!=" if excludes(kind) else "="
    nodes, labels = instance.graph.nodes, instance.labels.names

    def encode(node: ShatteredTree) -> dict:
        if node.is_leaf:
            return {"leaf": True}
        return {
            "node": nodes[node.node],
            "edges": [
                {
                    "node": nodes[edge.node],
                    "relation": relation,
                    "label": labels[edge.label],
                    "child": encode(child),
                }
                for edge, child in zip(node.edges, node.children)
            ],
        }

    return {"kind": DimensionKind(kind).value, "depth": tree.depth, "root": encode(tree)}
