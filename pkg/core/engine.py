"""
Game Engine

Round loop of the improvement game:
    1. adversary picks x
    2. learner publishes h on Δ(x)
    3. agent best-responds to v
    4. adversary answers for v (label, or mistake bit under bandit feedback)
    5. learner pays 1[h(v) != y] and updates

The engine keeps its own environment version space (every hypothesis
consistent with the answers so far) and aborts the moment it empties.
Transcripts are plain data; check_transcript replays one from scratch.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

import numpy as np

from core.adversary import Adversary, is_bandit
from core.constants import DEFAULT_SEED, DEFAULT_TIE_POLICY
from core.dimensions import KIND_FOR_SETTING, calculator_for
from core.errors import DomainError, ProtocolError, RealizabilityError
from core.learners import BanditFeedback, FullFeedback, OnlineLearner
from core.model import Instance, VersionSpace, lowest_member
from core.response import TiePolicy, best_response, label_at, maximizers

log = logging.getLogger(__name__)

CLASSIC = "classic"


@dataclass(frozen=True)
class GameConfig:
    setting: str = "binary"
    tie_policy: TiePolicy = TiePolicy(DEFAULT_TIE_POLICY)
    horizon: Optional[int] = None
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        object.__setattr__(self, "tie_policy", TiePolicy(self.tie_policy))


@dataclass(frozen=True)
class Round:
    x: int
    published: Dict[int, int]
    v: int
    prediction: int
    feedback: Union[int, bool]
    mistake: bool
    dim: Optional[int]


@dataclass
class Transcript:
    instance: str
    setting: str
    tie_policy: str
    learner: str
    adversary: str
    initial_dim: Optional[int]
    rounds: List[Round] = field(default_factory=list)
    witness: Optional[int] = None

    @property
    def mistakes(self) -> int:
        return sum(1 for r in self.rounds if r.mistake)

    @property
    def bandit(self) -> bool:
        return is_bandit(self.setting)

    def to_dict(self, instance: Instance) -> dict:
        nodes, labels = instance.graph.nodes, instance.labels.names
        hyps = instance.hypotheses.names
        return {
            "instance": self.instance,
            "setting": self.setting,
            "tie_policy": self.tie_policy,
            "learner": self.learner,
            "adversary": self.adversary,
            "initial_dim": self.initial_dim,
            "rounds": [
                {
                    "x": nodes[r.x],
                    "published": {nodes[u]: labels[y] for u, y in sorted(r.published.items())},
                    "v": nodes[r.v],
                    "prediction": labels[r.prediction],
                    "feedback": bool(r.feedback) if self.bandit else labels[r.feedback],
                    "mistake": bool(r.mistake),
                    "dim": r.dim,
                }
                for r in self.rounds
            ],
            "mistakes": self.mistakes,
            "witness_hypothesis": hyps[self.witness] if self.witness is not None else None,
        }

    @classmethod
    def from_dict(cls, payload: dict, instance: Instance) -> "Transcript":
        graph, labels, hyps = instance.graph, instance.labels, instance.hypotheses
        setting = payload.get("setting", "binary")
        bandit = is_bandit(setting)

        try:
            rounds = [
                Round(
                    x=graph.index(r["x"]),
                    published={graph.index(u): labels.index(y) for u, y in r["published"].items()},
                    v=graph.index(r["v"]),
                    prediction=labels.index(r["prediction"]),
                    feedback=bool(r["feedback"]) if bandit else labels.index(r["feedback"]),
                    mistake=bool(r["mistake"]),
                    dim=r.get("dim"),
                )
                for r in payload["rounds"]
            ]
        except KeyError as exc:
            raise ValueError(f"transcript round is missing field {exc}") from None

        witness = payload.get("witness_hypothesis")
        return cls(
            instance=payload.get("instance", instance.name),
            setting=setting,
            tie_policy=payload.get("tie_policy", DEFAULT_TIE_POLICY),
            learner=payload.get("learner", "unknown"),
            adversary=payload.get("adversary", "unknown"),
            initial_dim=payload.get("initial_dim"),
            rounds=rounds,
            witness=hyps.index(witness) if witness is not None else None,
        )


def world_for(instance: Instance, setting: str) -> Instance:
    """Instance a game in this setting is played on; classic games have no moves."""
    if setting == CLASSIC:
        return instance.with_graph(instance.graph.self_loops_only())
    return instance.for_setting(setting)


def default_horizon(world: Instance, setting: str, learner_dim: Optional[int] = None) -> int:
    """|H| · (dim + 1), with dim the larger of the learner's and the setting's."""
    dims = [learner_dim] if learner_dim is not None else []
    if setting in KIND_FOR_SETTING:
        dims.append(calculator_for(world).dimension(KIND_FOR_SETTING[setting], world.full()))
    return len(world.hypotheses) * (max(dims, default=0) + 1)


# ============================================================
# IMPROVEMENT GAME
# ============================================================

def _check_publication(world: Instance, x: int, published: Dict[int, int]) -> None:
    nbrs = set(world.graph.neighbors(x))
    stray = [u for u in published if u not in nbrs]
    if stray:
        raise ProtocolError(f"publication at x={x} labels nodes outside Δ(x): {stray}")
    bad = [y for y in published.values() if not 0 <= y < world.labels.k]
    if bad:
        raise ProtocolError(f"publication at x={x} uses unknown labels: {bad}")


def _destination(world, x, published, config, adversary, rng, env) -> int:
    candidates = maximizers(published, x, world)
    if len(candidates) == 1:
        return candidates[0]
    if config.tie_policy is TiePolicy.ADVERSARIAL:
        v = adversary.pick_destination(x, published, candidates, env)
        if v not in candidates:
            raise ProtocolError(f"adversary sent the agent to {v}, not a best response")
        return v
    return best_response(published, x, world, config.tie_policy, rng)


def run_game(learner: OnlineLearner, adversary: Adversary, config: GameConfig) -> Transcript:
    """Play until the adversary yields or the horizon is reached."""
    world = adversary.instance
    if learner.instance.graph != world.graph:
        raise DomainError("learner and adversary are built on different graphs")

    bandit = is_bandit(config.setting)
    if bandit and learner.needs_full_feedback:
        raise DomainError(f"{learner.name} needs full feedback, setting is {config.setting}")

    rng = np.random.default_rng(config.seed)
    env = world.full()
    initial_dim = learner.dimension()
    horizon = config.horizon if config.horizon is not None else default_horizon(
        world, config.setting, initial_dim
    )
    transcript = Transcript(
        instance=world.name,
        setting=config.setting,
        tie_policy=config.tie_policy.value,
        learner=learner.name,
        adversary=adversary.name,
        initial_dim=initial_dim,
    )
    log.info(
        "game %s: %s vs %s, setting=%s, horizon=%d",
        world.name, learner.name, adversary.name, config.setting, horizon,
    )

    for t in range(horizon):
        x = adversary.next_instance(env)
        if x is None:
            break

        published = learner.publish(x)
        _check_publication(world, x, published)
        v = _destination(world, x, published, config, adversary, rng, env)
        prediction = label_at(published, v)

        if bandit:
            mistake = bool(adversary.reveal_mistake(x, published, v, env))
            env = env.restrict_not(v, prediction) if mistake else env.restrict(v, prediction)
            feedback = BanditFeedback(x=x, v=v, mistake=mistake)
            answer: Union[int, bool] = mistake
        else:
            y = int(adversary.reveal_label(x, published, v, env))
            mistake = y != prediction
            env = env.restrict(v, y)
            feedback = FullFeedback(x=x, v=v, label=y, mistake=mistake)
            answer = y

        if env.is_empty:
            raise RealizabilityError(t)

        learner.update(feedback)
        round_ = Round(x, dict(published), v, prediction, answer, mistake, learner.dimension())
        transcript.rounds.append(round_)
        log.debug("round %d: %s", t, round_)

    transcript.witness = lowest_member(env.mask) if env.mask else None
    log.info("game %s: %d mistakes in %d rounds", world.name, transcript.mistakes, len(transcript.rounds))
    return transcript


# ============================================================
# CLASSIC GAME (NO IMPROVEMENTS)
# ============================================================

def run_classic_game(learner, adversary: Adversary, config: GameConfig) -> Transcript:
    """
    Plain online learning: the learner predicts a label for x and the agent
    never moves. The learner needs predict(x) and update(x, y); it is only
    updated on mistakes.
    """
    world = adversary.instance
    rng = np.random.default_rng(config.seed)
    env = world.full()
    initial_dim = learner.dimension()
    horizon = config.horizon if config.horizon is not None else default_horizon(
        world, CLASSIC, initial_dim
    )
    transcript = Transcript(
        instance=world.name,
        setting=CLASSIC,
        tie_policy=config.tie_policy.value,
        learner=learner.name,
        adversary=adversary.name,
        initial_dim=initial_dim,
    )

    for t in range(horizon):
        x = adversary.next_instance(env)
        if x is None:
            break
        prediction = learner.predict(x)
        published = {x: prediction}
        v = _destination(world, x, published, config, adversary, rng, env)
        y = int(adversary.reveal_label(x, published, v, env))
        env = env.restrict(v, y)
        if env.is_empty:
            raise RealizabilityError(t)

        mistake = y != prediction
        if mistake:
            learner.update(x, y)
        transcript.rounds.append(Round(x, published, v, prediction, y, mistake, learner.dimension()))

    transcript.witness = lowest_member(env.mask) if env.mask else None
    return transcript


# ============================================================
# REPLAY CHECK
# ============================================================

def check_transcript(transcript: Transcript, instance: Instance) -> List[str]:
    """Replay every round against the instance; one message per violation."""
    world = world_for(instance, transcript.setting)
    bandit = transcript.bandit
    policy = TiePolicy(transcript.tie_policy)
    env: VersionSpace = world.full()
    violations: List[str] = []
    last_dim = transcript.initial_dim

    for r, rd in enumerate(transcript.rounds):
        nbrs = world.graph.neighbors(rd.x)
        stray = sorted(u for u in rd.published if u not in nbrs)
        if stray:
            violations.append(f"round {r}: publication labels nodes outside Δ(x): {stray}")

        candidates = maximizers(rd.published, rd.x, world)
        if rd.v not in candidates:
            violations.append(f"round {r}: destination {rd.v} is not a best response (expected one of {list(candidates)})")
        elif policy is TiePolicy.LEXICOGRAPHIC_MIN and rd.v != candidates[0]:
            violations.append(f"round {r}: destination {rd.v} breaks the lexicographic-min tie rule")

        if rd.prediction != label_at(rd.published, rd.v):
            violations.append(f"round {r}: prediction does not match the published label at {rd.v}")

        if bandit:
            if bool(rd.feedback) != rd.mistake:
                violations.append(f"round {r}: mistake flag disagrees with the feedback bit")
            env = env.restrict_not(rd.v, rd.prediction) if rd.feedback else env.restrict(rd.v, rd.prediction)
        else:
            if (rd.feedback != rd.prediction) != rd.mistake:
                violations.append(f"round {r}: mistake flag disagrees with the revealed label")
            env = env.restrict(rd.v, rd.feedback)

        if env.is_empty:
            violations.append(f"round {r}: no hypothesis is consistent with the answers so far")
            break

        if rd.dim is not None and last_dim is not None and rd.dim > last_dim:
            violations.append(f"round {r}: dimension rose from {last_dim} to {rd.dim}")
        if rd.dim is not None:
            last_dim = rd.dim

    if transcript.witness is not None and transcript.witness not in env:
        violations.append(f"witness hypothesis {transcript.witness} is inconsistent with the transcript")

    for message in violations:
        log.warning("transcript %s: %s", transcript.instance, message)
    return violations
