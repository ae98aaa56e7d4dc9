"""
Instance Generators

Seeded random instances with bounded out-degree, plus the pair family on
which learning with improvements costs nothing while plain online learning
pays one mistake per pair.

Deterministic: same arguments, same instance, same bytes once dumped.
"""

import numpy as np

from core.constants import COST_GRID_STEP, DEFAULT_SEED
from core.model import HypothesisClass, ImprovementGraph, Instance, LabelSpace

# Population size above which distinct labelings are drawn by rejection
_DIRECT_DRAW_LIMIT = 1 << 16


def label_space(k: int) -> LabelSpace:
    if k < 2:
        raise ValueError(f"'labels' must be at least 2, got {k}")
    if k == 2:
        return LabelSpace.binary()
    return LabelSpace(
        names=tuple(f"z{i + 1}" for i in range(k)),
        values=tuple(float(i) for i in range(k)),
    )


def _draw_graph(rng, n: int, degree: int, top_gap: float, weighted: bool) -> ImprovementGraph:
    nodes = tuple(f"x{i + 1}" for i in range(n))
    steps = int(round(top_gap / COST_GRID_STEP))
    edges = []
    for x in range(n):
        others = [v for v in range(n) if v != x]
        count = min(int(rng.integers(0, degree + 1)), len(others))
        targets = sorted(int(v) for v in rng.choice(others, size=count, replace=False)) if count else []
        for v in targets:
            # Grid runs one step past the top gap so some edges are useless
            cost = COST_GRID_STEP * int(rng.integers(0, steps + 2)) if weighted else 0.0
            edges.append((x, v, cost))
    return ImprovementGraph.from_edges(nodes, edges)


def _draw_labelings(rng, n: int, k: int, m: int) -> np.ndarray:
    population = k ** n
    if m > population:
        raise ValueError(f"'hyps' must be at most {population} for {n} nodes and {k} labels, got {m}")

    if population <= _DIRECT_DRAW_LIMIT:
        codes = sorted(int(c) for c in rng.choice(population, size=m, replace=False))
        table = np.array([[(c // k ** j) % k for j in range(n)] for c in codes], dtype=np.int16)
        return table.reshape(m, n)

    seen, rows = set(), []
    while len(rows) < m:
        row = tuple(int(y) for y in rng.integers(0, k, size=n))
        if row not in seen:
            seen.add(row)
            rows.append(row)
    return np.array(sorted(rows), dtype=np.int16).reshape(m, n)


def generate_instance(
    nodes: int,
    degree: int,
    labels: int,
    hyps: int,
    weighted: bool = False,
    seed: int = DEFAULT_SEED,
    name: str = None,
) -> Instance:
    """
    Random instance: every node gets up to `degree` distinct out-neighbors
    besides its self-loop, `hyps` distinct total labelings. Weighted costs
    sit on a grid of COST_GRID_STEP label units.
    """
    if nodes < 1:
        raise ValueError(f"'nodes' must be positive, got {nodes}")
    if degree < 0:
        raise ValueError(f"'degree' must be non-negative, got {degree}")
    if hyps < 1:
        raise ValueError(f"'hyps' must be positive, got {hyps}")

    rng = np.random.default_rng(seed)
    space = label_space(labels)
    graph = _draw_graph(rng, nodes, degree, space.gap(space.top), weighted)
    table = _draw_labelings(rng, nodes, labels, hyps)

    hclass = HypothesisClass(
        names=tuple(f"h{i + 1}" for i in range(hyps)),
        table=table,
        k=labels,
    )
    suffix = "-w" if weighted else ""
    return Instance(
        graph,
        space,
        hclass,
        name=name or f"gen-n{nodes}-d{degree}-k{labels}-m{hyps}{suffix}-s{seed}",
    )


def pair_family_instance(pairs: int) -> Instance:
    """
    Pairs x_i -> x_i' with every x_i' labeled 1 and every labeling of the
    x_i present: 2^pairs hypotheses, Littlestone dimension `pairs`,
    improvement dimension 0.
    """
    if pairs < 1:
        raise ValueError(f"'pairs' must be positive, got {pairs}")

    nodes = []
    for i in range(1, pairs + 1):
        nodes += [f"x{i}", f"x{i}'"]
    edges = [(2 * i, 2 * i + 1, 0.0) for i in range(pairs)]
    graph = ImprovementGraph.from_edges(nodes, edges)

    rows = []
    for code in range(2 ** pairs):
        row = []
        for i in range(pairs):
            row += [(code >> i) & 1, 1]
        rows.append(row)

    hclass = HypothesisClass(
        names=tuple(f"h{code:0{pairs}b}" for code in range(2 ** pairs)),
        table=np.array(rows, dtype=np.int16),
        k=2,
    )
    return Instance(graph, LabelSpace.binary(), hclass, name=f"pair-family-n{pairs}")
