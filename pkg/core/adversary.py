"""
Adversaries

The environment side of the game: which x arrives, where a tied agent
goes, and what label (or mistake bit) the round ends with. Every answer
keeps the environment version space nonempty.

    TreeAdversary        walks a shattered tree, one forced mistake per level
    RandomAdversary      seeded fuzzing, any realizable answer
    ExhaustiveAdversary  optimal play against one deterministic learner
"""

import logging
from abc import ABC, abstractmethod
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from core.constants import MEMO_LIMIT
from core.dimensions import KIND_FOR_SETTING, DimensionKind, calculator_for
from core.errors import DomainError, ResourceLimitError
from core.learners import BanditFeedback, FullFeedback, OnlineLearner
from core.model import Instance, VersionSpace
from core.response import TiePolicy, label_at, maximizers
from core.trees import ShatteredTree, TreeEdge, witness_root

log = logging.getLogger(__name__)

BANDIT_SETTINGS = ("multiclass-bandit",)


def is_bandit(setting: str) -> bool:
    return setting in BANDIT_SETTINGS


class Adversary(ABC):
    name = "adversary"

    def __init__(self, instance: Instance, setting: str):
        self.instance = instance
        self.setting = setting
        self.masks = instance.hypotheses.label_masks

    @abstractmethod
    def next_instance(self, env: VersionSpace) -> Optional[int]:
        """Node for the coming round, or None to end the game."""

    @abstractmethod
    def reveal_label(self, x: int, published: Dict[int, int], v: int, env: VersionSpace) -> int:
        """True label of v (full feedback)."""

    def reveal_mistake(self, x: int, published: Dict[int, int], v: int, env: VersionSpace) -> bool:
        """Mistake bit at v (bandit feedback). Defaults to the label answer."""
        return self.reveal_label(x, published, v, env) != label_at(published, v)

    def pick_destination(
        self, x: int, published: Dict[int, int], candidates: Sequence[int], env: VersionSpace
    ) -> int:
        """Resolve an adversarial tie between equally profitable moves."""
        return candidates[0]

    # ---- realizable answers ----

    def feasible_labels(self, v: int, env: VersionSpace) -> List[int]:
        return [y for y in range(self.instance.labels.k) if env.mask & self.masks[v][y]]

    def feasible_mistakes(self, v: int, prediction: int, env: VersionSpace) -> List[bool]:
        options = []
        if env.mask & ~self.masks[v][prediction]:
            options.append(True)
        if env.mask & self.masks[v][prediction]:
            options.append(False)
        return options


# ============================================================
# TREE ADVERSARY
# ============================================================

class TreeAdversary(Adversary):
    """
    Follows a shattered tree of the setting's family. With an explicit tree
    it walks that tree; otherwise each node is read off the dimension
    recursion at the current environment.

    At the learner's destination v the adversary takes an edge at v that
    disagrees with the prediction (preferring the z_1 edge), or for bandit
    trees the edge (v, h(v)) with a mistake declared.
    """

    name = "tree"

    def __init__(
        self,
        instance: Instance,
        setting: str,
        tree: Optional[ShatteredTree] = None,
        kind=None,
    ):
        super().__init__(instance, setting)
        self.kind = DimensionKind(kind) if kind is not None else KIND_FOR_SETTING[setting]
        if is_bandit(setting) != (self.kind is DimensionKind.BIL):
            raise DomainError(
                f"tree kind '{self.kind.value}' does not match setting '{setting}'"
            )

        self.tree = tree
        self.depth = (
            tree.depth if tree is not None
            else calculator_for(instance).dimension(self.kind, instance.full())
        )
        self._node: Optional[Tuple[int, Tuple[TreeEdge, ...]]] = None
        self._taken: Optional[TreeEdge] = None

    def next_instance(self, env: VersionSpace) -> Optional[int]:
        if self.depth <= 0:
            return None
        if self.tree is not None:
            if self.tree.is_leaf:
                return None
            self._node = (self.tree.node, self.tree.edges)
        else:
            self._node = witness_root(self.instance, self.kind, env.mask, self.depth)
            if self._node is None:
                return None
        return self._node[0]

    def _edge_at(self, published: Dict[int, int], v: int) -> Optional[TreeEdge]:
        prediction = label_at(published, v)
        edges = [e for e in self._node[1] if e.node == v]
        if self.kind is DimensionKind.BIL:
            hits = [e for e in edges if e.label == prediction]
        else:
            hits = sorted((e for e in edges if e.label != prediction), key=lambda e: e.label)
        return hits[0] if hits else None

    def _descend(self, edge: TreeEdge) -> None:
        log.debug("tree adversary takes edge (%d, %d)", edge.node, edge.label)
        if self.tree is not None:
            self.tree = self.tree.child(edge)
        self.depth -= 1

    def _leave_tree(self) -> None:
        # Destination is off the tree's edges: stop after this round
        self.depth = 0
        self.tree = None

    def reveal_label(self, x: int, published: Dict[int, int], v: int, env: VersionSpace) -> int:
        edge = self._edge_at(published, v)
        if edge is None or not env.mask & self.masks[v][edge.label]:
            self._leave_tree()
            labels = self.feasible_labels(v, env)
            prediction = label_at(published, v)
            return prediction if prediction in labels else labels[0]
        self._descend(edge)
        return edge.label

    def reveal_mistake(self, x: int, published: Dict[int, int], v: int, env: VersionSpace) -> bool:
        prediction = label_at(published, v)
        edge = self._edge_at(published, v)
        if edge is None or not env.mask & ~self.masks[v][prediction]:
            self._leave_tree()
            return self.feasible_mistakes(v, prediction, env)[-1]
        self._descend(edge)
        return True


# ============================================================
# RANDOM ADVERSARY
# ============================================================

class RandomAdversary(Adversary):
    """Uniform instances, destinations and realizable answers from a seeded rng."""

    name = "random"

    def __init__(self, instance: Instance, setting: str, seed: int = 0):
        super().__init__(instance, setting)
        self.seed = seed
        self.rng = np.random.default_rng(seed)

    def next_instance(self, env: VersionSpace) -> Optional[int]:
        return int(self.rng.integers(self.instance.graph.n))

    def pick_destination(self, x, published, candidates, env) -> int:
        return candidates[int(self.rng.integers(len(candidates)))]

    def reveal_label(self, x, published, v, env) -> int:
        labels = self.feasible_labels(v, env)
        return labels[int(self.rng.integers(len(labels)))]

    def reveal_mistake(self, x, published, v, env) -> bool:
        options = self.feasible_mistakes(v, label_at(published, v), env)
        return options[int(self.rng.integers(len(options)))]


# ============================================================
# EXHAUSTIVE ADVERSARY
# ============================================================

class ExhaustiveAdversary(Adversary):
    """
    Optimal adversary against one deterministic learner: searches every
    instance, tied destination and realizable answer, memoized on
    (learner state, environment mask), and plays the maximizing line.

    The learner passed in is the live one; the search only touches clones.
    """

    name = "exhaustive"

    def __init__(
        self,
        instance: Instance,
        setting: str,
        learner: OnlineLearner,
        tie_policy=TiePolicy.LEXICOGRAPHIC_MIN,
    ):
        super().__init__(instance, setting)
        self.tie_policy = TiePolicy(tie_policy)
        if self.tie_policy is TiePolicy.SEEDED_RANDOM:
            raise DomainError("exhaustive adversary needs a deterministic tie policy")
        self.learner = learner
        self.bandit = is_bandit(setting)
        self._memo: Dict[Tuple[Hashable, int], int] = {}
        self._active: Dict[Tuple[Hashable, int], int] = {}
        self._path_mistakes = 0

    @property
    def memo_size(self) -> int:
        return len(self._memo)

    # ---- search ----

    def value(self, learner: OnlineLearner, env: int) -> int:
        return self._value(learner, env)[0]

    def _value(self, learner: OnlineLearner, env: int) -> Tuple[int, bool]:
        key = (learner.state_key(), env)
        if key in self._memo:
            return self._memo[key], False
        if key in self._active:
            if self._path_mistakes > self._active[key]:
                raise ResourceLimitError(
                    f"{learner.name} can be forced into a mistake cycle"
                )
            return 0, True
        if len(self._memo) >= MEMO_LIMIT:
            raise ResourceLimitError(f"exhaustive adversary memo exceeded {MEMO_LIMIT} entries")

        self._active[key] = self._path_mistakes
        best, tainted = 0, False
        try:
            for x in range(self.instance.graph.n):
                score, t = self._instance_value(learner, env, x, key)
                best, tainted = max(best, score), tainted or t
        finally:
            del self._active[key]

        if not tainted:
            self._memo[key] = best
        return best, tainted

    def _instance_value(self, learner, env: int, x: int, key) -> Tuple[int, bool]:
        probe = learner.clone()
        published = probe.publish(x)
        best, tainted = 0, False
        for v in self._destinations(x, published):
            for score, t, _ in self._outcomes(probe, env, x, published, v, key):
                best, tainted = max(best, score), tainted or t
        return best, tainted

    def _destinations(self, x: int, published: Dict[int, int]) -> Tuple[int, ...]:
        candidates = maximizers(published, x, self.instance)
        if self.tie_policy is TiePolicy.ADVERSARIAL:
            return candidates
        return candidates[:1]

    def _outcomes(self, probe, env: int, x: int, published, v: int, key):
        """(mistakes forced from here, tainted, answer) per realizable answer."""
        prediction = label_at(published, v)
        env_vs = self.instance.version_space(env)

        if self.bandit:
            answers = [
                (mistake, BanditFeedback(x=x, v=v, mistake=mistake),
                 env & ~self.masks[v][prediction] if mistake else env & self.masks[v][prediction])
                for mistake in self.feasible_mistakes(v, prediction, env_vs)
            ]
        else:
            answers = [
                (y != prediction, FullFeedback(x=x, v=v, label=y, mistake=y != prediction),
                 env & self.masks[v][y])
                for y in self.feasible_labels(v, env_vs)
            ]

        for mistake, feedback, child_env in answers:
            child = probe.clone()
            child.update(feedback)
            answer = feedback.mistake if self.bandit else feedback.label
            if (child.state_key(), child_env) == key:
                if mistake:
                    raise ResourceLimitError(
                        f"{probe.name} repeats a mistake at node {v} without learning"
                    )
                yield 0, False, answer
                continue
            self._path_mistakes += int(mistake)
            try:
                sub, tainted = self._value(child, child_env)
            finally:
                self._path_mistakes -= int(mistake)
            yield int(mistake) + sub, tainted, answer

    # ---- play ----

    def next_instance(self, env: VersionSpace) -> Optional[int]:
        key = (self.learner.state_key(), env.mask)
        total = self.value(self.learner, env.mask)
        if total == 0:
            return None
        scores = [self._instance_value(self.learner, env.mask, x, key)[0] for x in range(self.instance.graph.n)]
        return int(np.argmax(scores))

    def _best_answer(self, published, v: int, env: VersionSpace, x: int):
        key = (self.learner.state_key(), env.mask)
        ranked = [
            (score, answer)
            for score, _, answer in self._outcomes(self.learner.clone(), env.mask, x, published, v, key)
        ]
        return max(ranked, key=lambda item: item[0])

    def pick_destination(self, x, published, candidates, env) -> int:
        scores = [self._best_answer(published, v, env, x)[0] for v in candidates]
        return candidates[int(np.argmax(scores))]

    def reveal_label(self, x, published, v, env) -> int:
        return self._best_answer(published, v, env, x)[1]

    def reveal_mistake(self, x, published, v, env) -> bool:
        return self._best_answer(published, v, env, x)[1]


# ============================================================
# REGISTRY
# ============================================================

def build_adversary(
    name: str,
    instance: Instance,
    setting: str,
    learner: Optional[OnlineLearner] = None,
    tie_policy=TiePolicy.LEXICOGRAPHIC_MIN,
    seed: int = 0,
    kind=None,
) -> Adversary:
    if name == "tree":
        return TreeAdversary(instance, setting, kind=kind)
    if name == "random":
        return RandomAdversary(instance, setting, seed=seed)
    if name == "exhaustive":
        if learner is None:
            raise ValueError("exhaustive adversary needs the learner it plays against")
        return ExhaustiveAdversary(instance, setting, learner, tie_policy)
    raise ValueError(f"Unknown adversary: '{name}'")
