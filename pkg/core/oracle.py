"""
Minimax Oracle

Exact value of the deterministic improvement game, searched over every
instance, every labeling of Δ(x), every tied destination and every
realizable answer:

    value(V) = max_x  min_h  max_{v tied}  max_answer  [mistake + value(V')]

A version space with at most one member is worth 0. Answers that leave V
unchanged are skipped when correct and unbounded when wrong; a learner
always has a publication avoiding the latter (publish any member of V).

Desk scale only. Limits live in core/constants.py.
"""

import logging
from itertools import product
from typing import Dict, List, Optional, Tuple

from core.constants import (
    MAX_ORACLE_HYPOTHESES,
    MAX_ORACLE_NODES,
    MAX_ORACLE_PUBLICATIONS,
    MEMO_LIMIT,
    UNBOUNDED,
)
from core.adversary import is_bandit
from core.dimensions import KIND_FOR_SETTING, calculator_for
from core.errors import ResourceLimitError
from core.model import Instance, VersionSpace, iter_members
from core.response import maximizers

log = logging.getLogger(__name__)


class MinimaxSolver:
    """Game values of one (instance, setting), memoized on the version-space mask."""

    def __init__(self, instance: Instance, setting: str):
        self.setting = setting
        self.world = instance.for_setting(setting)
        self.bandit = is_bandit(setting)
        self.masks = self.world.hypotheses.label_masks
        self.k = self.world.labels.k
        self._check_limits()

        # ---- every publication on Δ(x) with its tied destinations ----
        self._moves: List[List[Tuple[Dict[int, int], Tuple[int, ...]]]] = []
        for x in range(self.world.graph.n):
            nbrs = self.world.graph.neighbors(x)
            moves = []
            for labels in product(range(self.k), repeat=len(nbrs)):
                h = dict(zip(nbrs, labels))
                moves.append((h, maximizers(h, x, self.world)))
            self._moves.append(moves)

        self._memo: Dict[int, int] = {}

    def _check_limits(self) -> None:
        world = self.world
        if world.graph.n > MAX_ORACLE_NODES:
            raise ResourceLimitError(f"oracle limited to {MAX_ORACLE_NODES} nodes, got {world.graph.n}")
        if len(world.hypotheses) > MAX_ORACLE_HYPOTHESES:
            raise ResourceLimitError(
                f"oracle limited to {MAX_ORACLE_HYPOTHESES} hypotheses, got {len(world.hypotheses)}"
            )
        publications = self.k ** world.graph.max_degree
        if publications > MAX_ORACLE_PUBLICATIONS:
            raise ResourceLimitError(
                f"oracle limited to {MAX_ORACLE_PUBLICATIONS} publications per node, got {publications}"
            )

    @property
    def memo(self) -> Dict[int, int]:
        return self._memo

    # ---- search ----

    def value(self, vs: Optional[VersionSpace] = None) -> int:
        mask = (vs if vs is not None else self.world.full()).mask
        return self._value(mask)

    def instance_value(self, mask: int, x: int, floor: int = 0) -> int:
        """Learner's best guarantee once x is drawn; exact whenever above floor."""
        inner = UNBOUNDED
        for h, destinations in self._moves[x]:
            worst = 0
            for v in destinations:
                worst = max(worst, self._answer_value(mask, h, v, inner))
                if worst >= inner:
                    break
            inner = min(inner, worst)
            if inner <= floor:
                break
        return inner

    def _value(self, mask: int) -> int:
        if mask & (mask - 1) == 0:
            return 0
        cached = self._memo.get(mask)
        if cached is not None:
            return cached

        best = 0
        for x in range(self.world.graph.n):
            best = max(best, self.instance_value(mask, x, floor=best))

        if len(self._memo) >= MEMO_LIMIT:
            raise ResourceLimitError(f"oracle memo exceeded {MEMO_LIMIT} entries")
        self._memo[mask] = best
        return best

    def _answer_value(self, mask: int, h: Dict[int, int], v: int, cap: int) -> int:
        prediction = h.get(v, 0)
        if self.bandit:
            answers = (
                (True, mask & ~self.masks[v][prediction]),
                (False, mask & self.masks[v][prediction]),
            )
        else:
            answers = tuple((y != prediction, mask & self.masks[v][y]) for y in range(self.k))

        best = 0
        for mistake, child in answers:
            if child == 0:
                continue
            if child == mask:
                if mistake:
                    return UNBOUNDED
                continue
            best = max(best, int(mistake) + self._value(child))
            if best >= cap:
                break
        return best


# ============================================================
# MODULE-LEVEL API
# ============================================================

def minimax_value(instance: Instance, setting: str, vs: Optional[VersionSpace] = None) -> int:
    solver = MinimaxSolver(instance, setting)
    value = solver.value(vs)
    log.info("minimax %s/%s: value=%d, memo=%d", instance.name, setting, value, len(solver.memo))
    return value


def certify_dimension(instance: Instance, setting: str) -> dict:
    """
    Game value against the setting's dimension. On disagreement the
    smallest searched version space where the two differ is reported.
    """
    solver = MinimaxSolver(instance, setting)
    world = solver.world
    kind = KIND_FOR_SETTING[setting]
    calc = calculator_for(world)

    value = solver.value()
    dim = calc.dimension(kind, world.full())
    result = {
        "instance": instance.name,
        "setting": setting,
        "kind": kind.value,
        "value": value,
        "dimension": dim,
        "equal": value == dim,
        "memo_size": len(solver.memo),
        "mismatch": None,
    }

    if value != dim:
        for mask in sorted(solver.memo, key=lambda m: (bin(m).count("1"), m)):
            sub_value, sub_dim = solver.memo[mask], calc.dimension(kind, mask)
            if sub_value != sub_dim:
                result["mismatch"] = {
                    "hypotheses": [world.hypotheses.names[i] for i in iter_members(mask)],
                    "value": sub_value,
                    "dimension": sub_dim,
                }
                break
        log.warning("certify %s/%s: value=%d dim=%d MISMATCH", instance.name, setting, value, dim)
    else:
        log.info("certify %s/%s: value=dim=%d", instance.name, setting, value)
    return result
