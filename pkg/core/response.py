"""
Agent Best Response

An agent at x facing a published hypothesis h moves to the v in Δ(x)
maximizing val(h(v)) − val(h(x)) − cost(x,v), and only if that maximum is
strictly positive.

Published hypotheses are partial maps node -> label over Δ(x); any node
they leave out reads as the bottom label z_1.
"""

from enum import Enum
from typing import Mapping, Optional, Tuple, Union

import numpy as np

from core.constants import GAIN_TOLERANCE
from core.model import Instance

Publication = Mapping[int, int]


class TiePolicy(str, Enum):
    ADVERSARIAL = "adversarial"
    LEXICOGRAPHIC_MIN = "lexicographic-min"
    SEEDED_RANDOM = "seeded-random"


def label_at(h: Publication, v: int) -> int:
    return h.get(v, 0)


def gain(h: Publication, x: int, v: int, instance: Instance) -> float:
    cost = instance.graph.cost(x, v)
    values = instance.labels.values
    return values[label_at(h, v)] - values[label_at(h, x)] - cost


def maximizers(h: Publication, x: int, instance: Instance) -> Tuple[int, ...]:
    """
    Every destination the agent may pick: the strictly profitable
    maximizers, or (x,) when no move is strictly profitable.
    """
    nbrs = instance.graph.neighbors(x)
    gains = [gain(h, x, v, instance) for v in nbrs]
    best = max(gains)
    if best <= GAIN_TOLERANCE:
        return (x,)
    return tuple(v for v, g in zip(nbrs, gains) if best - g <= GAIN_TOLERANCE)


def best_response(
    h: Publication,
    x: int,
    instance: Instance,
    policy: Union[TiePolicy, str] = TiePolicy.LEXICOGRAPHIC_MIN,
    rng: Optional[np.random.Generator] = None,
) -> Union[int, Tuple[int, ...]]:
    """
    Agent destination under the tie policy. The adversarial policy has no
    single answer outside game search and returns the whole maximizer set.
    """
    policy = TiePolicy(policy)
    candidates = maximizers(h, x, instance)

    if policy is TiePolicy.ADVERSARIAL:
        return candidates
    if policy is TiePolicy.SEEDED_RANDOM and len(candidates) > 1:
        if rng is None:
            raise ValueError("seeded-random tie policy needs an rng")
        return candidates[int(rng.integers(len(candidates)))]
    return candidates[0]


def improvement_targets(h: Publication, x: int, instance: Instance) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """(Δ⁺(h,x), Δ⁻(h,x)): neighbors labeled above z_1, and labeled z_1."""
    nbrs = instance.graph.neighbors(x)
    plus = tuple(v for v in nbrs if label_at(h, v) != 0)
    minus = tuple(v for v in nbrs if label_at(h, v) == 0)
    return plus, minus


def binary_improvement_set(h: Publication, x: int, instance: Instance) -> Tuple[int, ...]:
    """Δ_h(x) of the binary unweighted setup: Δ⁺_h(x) if h(x)=0 and it is nonempty, else {x}."""
    plus, _ = improvement_targets(h, x, instance)
    if label_at(h, x) == 0 and plus:
        return plus
    return (x,)
