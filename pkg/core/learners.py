"""
Online Learners

Every improvement learner follows one loop: receive x, publish a hypothesis
on Δ(x), receive feedback for the round, update.

    ISOA: binary, version space, ILdim drops on every mistake
    MulticlassISOA: full feedback, three-case publication rule
    WeightedISOA: same rule against WILdim and costed moves
    BISOA: bandit feedback, BILdim drops on every mistake
    BanditReduction: bandit learner built from a pool of full-feedback experts
    BaselineWrapper: any learner without improvements, agents never move

Publications are only materialized on Δ(x); everything else reads as z_1.
Arbitrary choices (which node, which tied label) go to the lowest index.
"""

import copy
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, List, Optional, Tuple, Union

import numpy as np

from core.constants import MAX_EXPERT_POOL
from core.dimensions import DimensionKind, calculator_for, unique_argmax
from core.errors import (
    DomainError,
    InvariantError,
    NonRealizableError,
    ProtocolError,
    ResourceLimitError,
)
from core.model import Instance, VersionSpace
from core.response import label_at

log = logging.getLogger(__name__)


# ============================================================
# FEEDBACK
# ============================================================

@dataclass(frozen=True)
class FullFeedback:
    """Final feature v and the true label of v."""
    x: int
    v: int
    label: int
    mistake: bool


@dataclass(frozen=True)
class BanditFeedback:
    """Final feature v and whether the prediction at v was wrong. No label."""
    x: int
    v: int
    mistake: bool


Feedback = Union[FullFeedback, BanditFeedback]


# ============================================================
# INTERFACES
# ============================================================

class OnlineLearner(ABC):
    name = "learner"
    needs_full_feedback = False

    @abstractmethod
    def publish(self, x: int) -> Dict[int, int]:
        ...

    @abstractmethod
    def update(self, feedback: Feedback) -> None:
        ...

    def dimension(self) -> Optional[int]:
        """Dimension of whatever the learner still considers possible."""
        return None

    def state_key(self) -> Hashable:
        """Hashable summary; equal keys behave identically from here on."""
        raise NotImplementedError(f"{type(self).__name__} has no state key")

    def clone(self) -> "OnlineLearner":
        return copy.copy(self)

    def _require_full(self, feedback: Feedback) -> FullFeedback:
        if not isinstance(feedback, FullFeedback):
            raise ProtocolError(f"{self.name} needs full feedback, got {type(feedback).__name__}")
        return feedback


class VersionSpaceLearner(OnlineLearner):
    """Keeps V ⊆ H; mistakes shrink V, the matching dimension tracks progress."""

    kind = DimensionKind.IL_MULTICLASS

    def __init__(self, instance: Instance, vs: Optional[VersionSpace] = None):
        self.instance = instance
        self.calc = calculator_for(instance)
        self.graph = self.calc.graph_for(self.kind)
        self.k = instance.labels.k
        self.vs = vs if vs is not None else instance.full()
        self._published: Dict[int, int] = {}

    def dimension(self) -> int:
        return self.calc.dimension(self.kind, self.vs)

    def state_key(self) -> Hashable:
        return self.vs.mask

    def _live_dimension(self) -> int:
        if self.vs.is_empty:
            raise NonRealizableError(f"{self.name}: version space is empty")
        return self.dimension()

    def _shrink(self, vs: VersionSpace, feedback: Feedback) -> None:
        if vs.is_empty:
            raise NonRealizableError(
                f"{self.name}: feedback at node {feedback.v} contradicts every hypothesis left"
            )
        self.vs = vs

    def _bottom_except(self, nbrs, node: int, label: int) -> Dict[int, int]:
        h = {u: 0 for u in nbrs}
        h[node] = label
        return h


# ============================================================
# BINARY ISOA
# ============================================================

class ISOA(VersionSpaceLearner):
    name = "isoa"
    kind = DimensionKind.IL_BINARY

    def __init__(self, instance: Instance, vs: Optional[VersionSpace] = None):
        if instance.labels.k != 2:
            raise DomainError(f"ISOA needs a binary label space, got k={instance.labels.k}")
        super().__init__(instance, vs)

    def publish(self, x: int) -> Dict[int, int]:
        top = self._live_dimension()
        nbrs = self.graph.neighbors(x)
        masks = self.instance.hypotheses.label_masks

        # h̃(u) = 1 iff labeling u with 0 would cost the version space dimension
        tilde = {
            u: int(self.calc.dimension(self.kind, self.vs.mask & masks[u][0]) < top)
            for u in nbrs
        }
        plus = [u for u in nbrs if tilde[u] == 1]

        if tilde[x] == 1 or not plus:
            h = tilde
        else:
            # Only the designated positive survives, so the destination is known
            h = self._bottom_except(nbrs, min(plus), 1)

        self._published = dict(h)
        return dict(h)

    def update(self, feedback: Feedback) -> None:
        if not feedback.mistake:
            return
        v = feedback.v
        self._shrink(self.vs.restrict(v, 1 - self._published.get(v, 0)), feedback)


# ============================================================
# MULTICLASS, FULL FEEDBACK
# ============================================================

class MulticlassISOA(VersionSpaceLearner):
    name = "multiclass-isoa"
    kind = DimensionKind.IL_MULTICLASS
    needs_full_feedback = True

    def publish(self, x: int) -> Dict[int, int]:
        top = self._live_dimension()
        mask = self.vs.mask
        nbrs = self.graph.neighbors(x)
        sub = {u: self.calc.sub_dimensions(self.kind, mask, u) for u in nbrs}

        # ---- Case A: some neighbor's best label already loses dimension ----
        for u in nbrs:
            if max(sub[u]) < top:
                log.debug("%s x=%d case A at %d", self.name, x, u)
                return self._commit(self._bottom_except(nbrs, u, self.k - 1))

        # ---- Case B: unique best label at x ----
        y = unique_argmax(sub[x])
        if y is not None:
            log.debug("%s x=%d case B label %d", self.name, x, y)
            return self._commit(self._bottom_except(nbrs, x, y))

        # ---- Case C: a neighbor with a unique best label worth moving for ----
        for u in self.graph.others(x):
            y = unique_argmax(sub[u])
            if y is not None and y not in self.calc.unmotivating(self.kind, x, u):
                log.debug("%s x=%d case C at %d label %d", self.name, x, u, y)
                return self._commit(self._bottom_except(nbrs, u, y))

        raise InvariantError(
            f"{self.name}: no publication case applies at x={x} "
            f"(mask={mask:#x}, dim={top}, sub-dimensions={sub})"
        )

    def _commit(self, h: Dict[int, int]) -> Dict[int, int]:
        self._published = dict(h)
        return dict(h)

    def update(self, feedback: Feedback) -> None:
        feedback = self._require_full(feedback)
        if not feedback.mistake:
            return
        self._shrink(self.vs.restrict(feedback.v, feedback.label), feedback)


class WeightedISOA(MulticlassISOA):
    """Three-case rule against WILdim; case C only for labels that pay for the move."""

    name = "weighted-isoa"
    kind = DimensionKind.WIL


# ============================================================
# MULTICLASS, BANDIT FEEDBACK
# ============================================================

class BISOA(VersionSpaceLearner):
    name = "bisoa"
    kind = DimensionKind.BIL

    def publish(self, x: int) -> Dict[int, int]:
        top = self._live_dimension()
        nbrs = self.graph.neighbors(x)

        for v in nbrs:
            excluded = self.calc.excluded_dimensions(self.kind, self.vs.mask, v)
            candidates = range(self.k) if v == x else range(1, self.k)
            y_hat = min(candidates, key=lambda y: (excluded[y], y))
            if excluded[y_hat] < top:
                h = self._bottom_except(nbrs, v, y_hat)
                self._published = dict(h)
                return dict(h)

        raise InvariantError(
            f"{self.name}: no node of Δ({x}) lowers BILdim "
            f"(mask={self.vs.mask:#x}, dim={top})"
        )

    def update(self, feedback: Feedback) -> None:
        if not feedback.mistake:
            return
        v = feedback.v
        self._shrink(self.vs.restrict_not(v, self._published.get(v, 0)), feedback)


# ============================================================
# BANDIT → FULL FEEDBACK REDUCTION
# ============================================================

@dataclass
class Expert:
    learner: OnlineLearner
    weight: float
    history: Tuple[Tuple[int, int], ...] = ()


def price_of_bandit_bound(k: int, max_degree: int, dim: int) -> float:
    """Mistake bound of the reduction: 2k(Δ_G+1)·ln(2(k−1))·dim."""
    return 2 * k * (max_degree + 1) * math.log(2 * (k - 1)) * max(dim, 0)


class BanditReduction(OnlineLearner):
    """
    Weighted pool of full-feedback experts. On a mistake every expert that
    behaved like the published hypothesis is replaced by k−1 children, one
    per guess of the hidden label, each carrying w/(2(k−1)).

    Expert votes: e(x') is the label expert e would publish at x' this round.
    Type-2 updates are applied at the agent's final feature v;
    literal_type2_update=True applies them at x instead.
    """

    name = "reduction"

    def __init__(
        self,
        instance: Instance,
        base_factory: Optional[Callable[[Instance], OnlineLearner]] = None,
        literal_type2_update: bool = False,
        max_pool: int = MAX_EXPERT_POOL,
    ):
        self.instance = instance
        self.graph = instance.graph
        self.k = instance.labels.k
        self.max_degree = instance.graph.max_degree
        self.literal_type2_update = literal_type2_update
        self.max_pool = max_pool

        base = (base_factory or MulticlassISOA)(instance)
        self.experts: List[Expert] = [Expert(base, 1.0)]
        self.decay_log: List[dict] = []
        self._round: Optional[Tuple[int, Dict[int, int], List[Dict[int, int]]]] = None

    # ---- pool accounting ----

    @property
    def total_weight(self) -> float:
        return float(sum(e.weight for e in self.experts))

    def threshold(self, total: float) -> float:
        return total / (self.k * (self.max_degree + 1))

    def dimension(self) -> Optional[int]:
        dims = [e.learner.dimension() for e in self.experts]
        dims = [d for d in dims if d is not None]
        return max(dims) if dims else None

    def state_key(self) -> Hashable:
        return tuple(sorted(
            (e.learner.state_key(), round(e.weight, 12)) for e in self.experts
        ))

    def clone(self) -> "BanditReduction":
        twin = copy.copy(self)
        twin.experts = [Expert(e.learner.clone(), e.weight, e.history) for e in self.experts]
        twin.decay_log = list(self.decay_log)
        return twin

    # ---- protocol ----

    def publish(self, x: int) -> Dict[int, int]:
        if not self.experts:
            raise ProtocolError("reduction: expert pool is empty")

        nbrs = self.graph.neighbors(x)
        votes = [e.learner.clone().publish(x) for e in self.experts]
        weights = np.array([e.weight for e in self.experts], dtype=float)
        threshold = self.threshold(weights.sum())

        h = {u: 0 for u in nbrs}
        for u in nbrs:
            column = np.array([label_at(vote, u) for vote in votes], dtype=int)
            tallies = np.bincount(column, weights=weights, minlength=self.k)
            y = 1 + int(np.argmax(tallies[1:]))
            if tallies[y] >= threshold:
                h[u] = y
                break

        self._round = (x, dict(h), votes)
        return dict(h)

    def update(self, feedback: Feedback) -> None:
        if not feedback.mistake:
            return
        if self._round is None or self._round[0] != feedback.x:
            raise ProtocolError("reduction: feedback for a round that was never published")

        x, h, votes = self._round
        v = feedback.v
        nbrs = self.graph.neighbors(x)
        before = self.total_weight

        if v == x and all(h[u] == 0 for u in nbrs):
            # ---- Type 1: stayed under an all-z_1 publication ----
            mistake_type = 1
            node = x
            matched = [all(label_at(vote, u) == 0 for u in nbrs) for vote in votes]
            guesses = range(1, self.k)
        else:
            # ---- Type 2: the single positive label was wrong ----
            mistake_type = 2
            node = x if self.literal_type2_update else v
            target = h.get(v, 0)
            matched = [label_at(vote, v) == target for vote in votes]
            guesses = [y for y in range(self.k) if y != target]

        share = 1.0 / (2 * (self.k - 1))
        pool: List[Expert] = []
        for expert, hit in zip(self.experts, matched):
            if not hit:
                pool.append(expert)
                continue
            for y in guesses:
                child = expert.learner.clone()
                try:
                    child.update(FullFeedback(x=x, v=node, label=y, mistake=True))
                except NonRealizableError:
                    continue
                pool.append(Expert(child, expert.weight * share, expert.history + ((node, y),)))

        if len(pool) > self.max_pool:
            raise ResourceLimitError(
                f"reduction: expert pool grew to {len(pool)} (limit {self.max_pool})"
            )

        self.experts = pool
        after = self.total_weight
        self.decay_log.append({
            "type": mistake_type,
            "before": before,
            "after": after,
            "factor": after / before,
            "experts": len(pool),
        })
        log.debug(
            "reduction mistake type %d at %d: weight %.6g -> %.6g, %d experts",
            mistake_type, v, before, after, len(pool),
        )


# ============================================================
# NO-IMPROVEMENT AND FIXED LEARNERS
# ============================================================

class SOA:
    """
    Standard optimal algorithm without improvements: predict the label whose
    restriction keeps the most Littlestone dimension.
    """

    name = "soa"
    kind = DimensionKind.LITTLESTONE

    def __init__(self, instance: Instance, vs: Optional[VersionSpace] = None):
        self.instance = instance
        self.calc = calculator_for(instance)
        self.vs = vs if vs is not None else instance.full()

    def predict(self, x: int) -> int:
        if self.vs.is_empty:
            raise NonRealizableError("soa: version space is empty")
        sub = self.calc.sub_dimensions(self.kind, self.vs.mask, x)
        return max(range(len(sub)), key=lambda y: (sub[y], -y))

    def update(self, x: int, y: int) -> None:
        vs = self.vs.restrict(x, y)
        if vs.is_empty:
            raise NonRealizableError(f"soa: label at node {x} contradicts every hypothesis left")
        self.vs = vs

    def dimension(self) -> int:
        return self.calc.dimension(self.kind, self.vs)

    def state_key(self) -> Hashable:
        return self.vs.mask

    def clone(self) -> "SOA":
        return copy.copy(self)


class BaselineWrapper(OnlineLearner):
    """Publish A(x) on x and z_1 on the rest of Δ(x): no agent ever moves."""

    needs_full_feedback = True

    def __init__(self, instance: Instance, inner=None):
        self.instance = instance
        self.inner = inner if inner is not None else SOA(instance)
        self.name = f"baseline({self.inner.name})"

    def publish(self, x: int) -> Dict[int, int]:
        h = {u: 0 for u in self.instance.graph.neighbors(x)}
        h[x] = self.inner.predict(x)
        return h

    def update(self, feedback: Feedback) -> None:
        feedback = self._require_full(feedback)
        if feedback.v != feedback.x:
            raise ProtocolError("baseline: agent moved under a wrapped publication")
        if feedback.mistake:
            self.inner.update(feedback.x, feedback.label)

    def dimension(self) -> Optional[int]:
        return self.inner.dimension()

    def state_key(self) -> Hashable:
        return self.inner.state_key()

    def clone(self) -> "BaselineWrapper":
        twin = copy.copy(self)
        twin.inner = self.inner.clone()
        return twin


class ConstantLearner(OnlineLearner):
    """Publishes one label on the whole of Δ(x) and never learns."""

    def __init__(self, instance: Instance, label: int = 0):
        self.instance = instance
        self.label = label
        self.name = f"constant({instance.labels.names[label]})"

    def publish(self, x: int) -> Dict[int, int]:
        return {u: self.label for u in self.instance.graph.neighbors(x)}

    def update(self, feedback: Feedback) -> None:
        return None

    def state_key(self) -> Hashable:
        return ()


class FixedLearner(OnlineLearner):
    """Publishes a fixed total labeling restricted to Δ(x)."""

    def __init__(self, instance: Instance, labeling: Dict[int, int], name: str = "fixed"):
        self.instance = instance
        self.labeling = dict(labeling)
        self.name = name

    def publish(self, x: int) -> Dict[int, int]:
        return {u: self.labeling.get(u, 0) for u in self.instance.graph.neighbors(x)}

    def update(self, feedback: Feedback) -> None:
        return None

    def state_key(self) -> Hashable:
        return ()

    @classmethod
    def top_on_sinks(cls, instance: Instance) -> "FixedLearner":
        """
        z_k on every node with no way out, z_1 elsewhere: the zero-mistake
        learner of the x_i / x_i' pair family.
        """
        graph = instance.graph
        labeling = {
            x: (instance.labels.top if not graph.others(x) else 0)
            for x in range(graph.n)
        }
        return cls(instance, labeling, name="fixed-sinks")


# ============================================================
# REGISTRY
# ============================================================

_IMPROVEMENT_LEARNERS = {
    "isoa": ISOA,
    "multiclass-isoa": MulticlassISOA,
    "bisoa": BISOA,
    "weighted-isoa": WeightedISOA,
    "baseline": BaselineWrapper,
    "constant": ConstantLearner,
}


def build_learner(name: str, instance: Instance, literal_type2_update: bool = False) -> OnlineLearner:
    """Improvement learner by registry name, over the instance the game is played on."""
    if name == "reduction":
        return BanditReduction(instance, literal_type2_update=literal_type2_update)
    try:
        return _IMPROVEMENT_LEARNERS[name](instance)
    except KeyError:
        raise ValueError(f"Unknown improvement learner: '{name}'") from None
