"""
Mistake-Bound Dimensions

Exact Littlestone, improvement Littlestone (binary and multiclass), bandit
and weighted dimensions of a version space, each computed by the recursion
its tree family induces:

    dim(V) >= d+1  iff  some node x has, for every edge group of the tree
                        node rooted at x, restricted version spaces of
                        dimension >= d.

Conventions: an empty version space has dimension -1, a nonempty one always
shatters the depth-0 tree. A restriction that leaves V unchanged is scored
as unbounded: V shatters whatever its strict subsets shatter, so that
branch never limits the recursion. Results are memoized per kind on the
version-space mask; the caches live in one calculator per instance and
are only ever filled, never invalidated.
"""

import logging
import weakref
from enum import Enum
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Set

from core.constants import MEMO_LIMIT, UNBOUNDED
from core.errors import DomainError, ResourceLimitError
from core.model import ImprovementGraph, Instance, VersionSpace, prune_useless_edges

log = logging.getLogger(__name__)


class DimensionKind(str, Enum):
    LITTLESTONE = "littlestone"
    IL_BINARY = "il-binary"
    IL_MULTICLASS = "il-multiclass"
    BIL = "bil"
    WIL = "wil"


KIND_FOR_SETTING = {
    "binary": DimensionKind.IL_BINARY,
    "multiclass-full": DimensionKind.IL_MULTICLASS,
    "multiclass-bandit": DimensionKind.BIL,
    "weighted-full": DimensionKind.WIL,
}


def _second_best(values: Iterable[int]) -> int:
    ordered = sorted(values, reverse=True)
    return ordered[1] if len(ordered) > 1 else -1


# ============================================================
# CALCULATOR
# ============================================================

class DimensionCalculator:
    """All five dimensions over one instance, with per-kind memo caches."""

    def __init__(self, instance: Instance):
        self.instance = instance
        self.graph = instance.graph
        # Weighted trees are defined over the pruned graph
        self.weighted_graph = prune_useless_edges(instance.graph, instance.labels)
        self.k = instance.labels.k
        self.masks = instance.hypotheses.label_masks
        self._caches: Dict[DimensionKind, Dict[int, int]] = {
            kind: {} for kind in DimensionKind
        }
        self._recursions: Dict[DimensionKind, Callable[[int], int]] = {
            DimensionKind.LITTLESTONE: self._littlestone,
            DimensionKind.IL_BINARY: self._il_binary,
            DimensionKind.IL_MULTICLASS: self._il_multiclass,
            DimensionKind.BIL: self._bandit,
            DimensionKind.WIL: self._weighted,
        }

    # ---- public entry points ----

    def dimension(self, kind, vs) -> int:
        kind = DimensionKind(kind)
        if kind is DimensionKind.IL_BINARY and self.k != 2:
            raise DomainError(f"il-binary needs exactly 2 labels, got {self.k}")
        mask = vs.mask if isinstance(vs, VersionSpace) else int(vs)
        return self._dim(kind, mask)

    def graph_for(self, kind) -> ImprovementGraph:
        return self.weighted_graph if DimensionKind(kind) is DimensionKind.WIL else self.graph

    def unmotivating(self, kind, x: int, v: int) -> FrozenSet[int]:
        """Labels a single edge (v, y) may carry at a tree node x."""
        if DimensionKind(kind) is DimensionKind.WIL:
            return self.instance.labels.unmotivating(self.weighted_graph.cost(x, v))
        return frozenset((0,))

    def sub_dimensions(self, kind, mask: int, x: int) -> List[int]:
        """[dim(V_{x,y}) for every label y]."""
        return [self.dimension(kind, mask & self.masks[x][y]) for y in range(self.k)]

    def excluded_dimensions(self, kind, mask: int, x: int) -> List[int]:
        """[dim(V_{x↛y}) for every label y]."""
        return [self.dimension(kind, mask & ~self.masks[x][y]) for y in range(self.k)]

    # ---- memoized core ----

    def _dim(self, kind: DimensionKind, mask: int) -> int:
        if mask == 0:
            return -1
        if mask & (mask - 1) == 0:
            return 0

        cache = self._caches[kind]
        value = cache.get(mask)
        if value is None:
            value = self._recursions[kind](mask)
            if len(cache) >= MEMO_LIMIT:
                raise ResourceLimitError(
                    f"{kind.value} cache exceeded {MEMO_LIMIT} entries"
                )
            cache[mask] = value
        return value

    def _eq(self, kind, mask: int, x: int, y: int) -> int:
        child = mask & self.masks[x][y]
        return UNBOUNDED if child == mask else self._dim(kind, child)

    def _neq(self, kind, mask: int, x: int, y: int) -> int:
        child = mask & ~self.masks[x][y]
        return UNBOUNDED if child == mask else self._dim(kind, child)

    # ---- recursions ----

    def _littlestone(self, mask: int) -> int:
        kind = DimensionKind.LITTLESTONE
        best = 0
        for x in range(self.graph.n):
            pair = _second_best(self._eq(kind, mask, x, y) for y in range(self.k))
            best = max(best, pair + 1)
        return best

    def _il_binary(self, mask: int) -> int:
        # Edges (x,1) and (v,0) for every v in Δ(x), self-loop included
        kind = DimensionKind.IL_BINARY
        best = 0
        for x in range(self.graph.n):
            bound = self._eq(kind, mask, x, 1)
            for v in self.graph.neighbors(x):
                if bound + 1 <= best:
                    break
                bound = min(bound, self._eq(kind, mask, v, 0))
            best = max(best, bound + 1)
        return best

    def _improvement(self, kind: DimensionKind, graph, mask: int) -> int:
        # Two labels on x; per neighbor one unmotivating label or two others
        best = 0
        for x in range(graph.n):
            bound = _second_best(self._eq(kind, mask, x, y) for y in range(self.k))
            for v in graph.others(x):
                if bound + 1 <= best:
                    break
                low = self.unmotivating(kind, x, v)
                single = max((self._eq(kind, mask, v, y) for y in low), default=-1)
                pair = _second_best(
                    self._eq(kind, mask, v, y) for y in range(self.k) if y not in low
                )
                bound = min(bound, max(single, pair))
            best = max(best, bound + 1)
        return best

    def _il_multiclass(self, mask: int) -> int:
        return self._improvement(DimensionKind.IL_MULTICLASS, self.graph, mask)

    def _weighted(self, mask: int) -> int:
        return self._improvement(DimensionKind.WIL, self.weighted_graph, mask)

    def _bandit(self, mask: int) -> int:
        # Every label excluded at x; every non-bottom label excluded at v != x
        kind = DimensionKind.BIL
        best = 0
        for x in range(self.graph.n):
            bound = min(self._neq(kind, mask, x, y) for y in range(self.k))
            for v in self.graph.others(x):
                if bound + 1 <= best:
                    break
                bound = min(
                    bound,
                    min(self._neq(kind, mask, v, y) for y in range(1, self.k)),
                )
            best = max(best, bound + 1)
        return best

    # ---- case analysis used by the multiclass learners ----

    def lemma_cases(self, kind, mask: int, x: int) -> Set[int]:
        """
        Which cases of the "possibilities" lemma hold at x:
          1: max_y dim(V_{x,y}) is attained at a unique y;
          2: some v in Δ(x)\\{x} has a unique argmax outside its
              unmotivating labels;
          3: some x' in Δ(x) has max_y dim(V_{x',y}) < dim(V).
        """
        kind = DimensionKind(kind)
        graph = self.graph_for(kind)
        top = self.dimension(kind, mask)
        cases = set()

        for u in graph.neighbors(x):
            if max(self.sub_dimensions(kind, mask, u)) < top:
                cases.add(3)
                break

        if unique_argmax(self.sub_dimensions(kind, mask, x)) is not None:
            cases.add(1)

        for v in graph.others(x):
            y = unique_argmax(self.sub_dimensions(kind, mask, v))
            if y is not None and y not in self.unmotivating(kind, x, v):
                cases.add(2)
                break
        return cases


def unique_argmax(values: List[int]) -> Optional[int]:
    best = max(values)
    hits = [i for i, value in enumerate(values) if value == best]
    return hits[0] if len(hits) == 1 else None


# ============================================================
# MODULE-LEVEL API
# ============================================================

_calculators: "weakref.WeakKeyDictionary[Instance, DimensionCalculator]" = weakref.WeakKeyDictionary()


def calculator_for(instance: Instance) -> DimensionCalculator:
    calc = _calculators.get(instance)
    if calc is None:
        calc = DimensionCalculator(instance)
        _calculators[instance] = calc
    return calc


def dimension(instance: Instance, kind, vs: Optional[VersionSpace] = None) -> int:
    calc = calculator_for(instance)
    return calc.dimension(kind, instance.full() if vs is None else vs)


def ldim(instance: Instance, vs: Optional[VersionSpace] = None) -> int:
    return dimension(instance, DimensionKind.LITTLESTONE, vs)


def ildim_binary(instance: Instance, vs: Optional[VersionSpace] = None) -> int:
    return dimension(instance, DimensionKind.IL_BINARY, vs)


def ildim_multiclass(instance: Instance, vs: Optional[VersionSpace] = None) -> int:
    return dimension(instance, DimensionKind.IL_MULTICLASS, vs)


def bildim(instance: Instance, vs: Optional[VersionSpace] = None) -> int:
    return dimension(instance, DimensionKind.BIL, vs)


def wildim(instance: Instance, vs: Optional[VersionSpace] = None) -> int:
    return dimension(instance, DimensionKind.WIL, vs)
