"""
Input Validation Utilities

Responsible for validating and sanitizing instance files and game-config
files before they enter the core.

No defaults beyond the documented ones. No inference. Fail fast.
"""

from core.constants import (
    ADVERSARIES,
    DEFAULT_SEED,
    DEFAULT_TIE_POLICY,
    LEARNERS,
    SETTINGS,
    TIE_POLICIES,
)

INSTANCE_FIELDS = ("nodes", "edges", "labels", "hypotheses")


def validate_numeric(name, value, min_val=None, max_val=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"'{name}' must be a number.")

    if min_val is not None and value < min_val:
        raise ValueError(f"'{name}' must be >= {min_val}.")

    if max_val is not None and value > max_val:
        raise ValueError(f"'{name}' must be <= {max_val}.")


def validate_integer(name, value, min_val=None, max_val=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"'{name}' must be an integer.")
    validate_numeric(name, value, min_val, max_val)


def validate_enum(name, value, allowed):
    if not isinstance(value, str):
        raise ValueError(f"'{name}' must be a string.")

    value = value.lower()
    if value not in allowed:
        raise ValueError(
            f"'{name}' must be one of {sorted(allowed)}."
        )

    return value


def validate_name(name, value):
    if not isinstance(value, str) or not value:
        raise ValueError(f"'{name}' must be a non-empty string.")
    return value


def _validate_unique(name, values):
    seen = set()
    for value in values:
        if value in seen:
            raise ValueError(f"Duplicate {name}: '{value}'")
        seen.add(value)


# ============================================================
# INSTANCE FILES
# ============================================================

def validate_instance_payload(payload: dict) -> dict:
    """
    Validate an instance document and return a sanitized copy.
    Self-loops may be omitted; hypotheses may leave nodes out (the model
    validator reports that, parsing does not reject it).
    """
    if not isinstance(payload, dict):
        raise ValueError("Instance must be a JSON object.")

    for key in INSTANCE_FIELDS:
        if key not in payload:
            raise ValueError(f"Missing required field: '{key}'")
        if not isinstance(payload[key], list):
            raise ValueError(f"'{key}' must be a list.")

    nodes = [validate_name("nodes[]", n) for n in payload["nodes"]]
    _validate_unique("node", nodes)
    known_nodes = set(nodes)

    edges = []
    for i, edge in enumerate(payload["edges"]):
        if not isinstance(edge, dict) or "from" not in edge or "to" not in edge:
            raise ValueError(f"edges[{i}] must have 'from' and 'to'.")
        for end in ("from", "to"):
            if edge[end] not in known_nodes:
                raise ValueError(f"edges[{i}].{end} is not a declared node: '{edge[end]}'")
        cost = edge.get("cost", 0.0)
        validate_numeric(f"edges[{i}].cost", cost)
        edges.append({"from": edge["from"], "to": edge["to"], "cost": float(cost)})

    labels = []
    for i, label in enumerate(payload["labels"]):
        if not isinstance(label, dict) or "name" not in label or "value" not in label:
            raise ValueError(f"labels[{i}] must have 'name' and 'value'.")
        validate_numeric(f"labels[{i}].value", label["value"])
        labels.append({
            "name": validate_name(f"labels[{i}].name", label["name"]),
            "value": float(label["value"]),
        })
    _validate_unique("label", [lab["name"] for lab in labels])
    known_labels = {lab["name"] for lab in labels}

    hypotheses = []
    for i, hyp in enumerate(payload["hypotheses"]):
        if not isinstance(hyp, dict) or not isinstance(hyp.get("labeling"), dict):
            raise ValueError(f"hypotheses[{i}] must have a 'labeling' object.")
        for node, label in hyp["labeling"].items():
            if node not in known_nodes:
                raise ValueError(f"hypotheses[{i}] labels undeclared node '{node}'")
            if label not in known_labels:
                raise ValueError(f"hypotheses[{i}] uses undeclared label '{label}'")
        hypotheses.append({
            "name": validate_name(f"hypotheses[{i}].name", hyp.get("name", f"h{i}")),
            "labeling": dict(hyp["labeling"]),
        })
    _validate_unique("hypothesis", [h["name"] for h in hypotheses])

    return {
        "name": payload.get("name", "instance"),
        "nodes": nodes,
        "edges": edges,
        "labels": labels,
        "hypotheses": hypotheses,
    }


# ============================================================
# GAME-CONFIG FILES
# ============================================================

def validate_game_config(payload: dict) -> dict:
    """Validate a game-config document; absent keys take documented defaults."""
    if not isinstance(payload, dict):
        raise ValueError("Game config must be a JSON object.")

    setting = validate_enum("setting", payload.get("setting", "binary"), SETTINGS)

    learner = payload.get("learner")
    if learner is not None:
        learner = validate_enum("learner", learner, LEARNERS)

    adversary = validate_enum("adversary", payload.get("adversary", "tree"), ADVERSARIES)
    tie_policy = validate_enum(
        "tie_policy",
        payload.get("tie_policy", DEFAULT_TIE_POLICY),
        TIE_POLICIES
    )

    horizon = payload.get("horizon")
    if horizon is not None:
        validate_integer("horizon", horizon, 0)

    seed = payload.get("seed", DEFAULT_SEED)
    validate_integer("seed", seed, 0)

    literal = payload.get("literal_type2_update", False)
    if not isinstance(literal, bool):
        raise ValueError("'literal_type2_update' must be a boolean.")

    return {
        "setting": setting,
        "learner": learner,
        "adversary": adversary,
        "tie_policy": tie_policy,
        "horizon": horizon,
        "seed": seed,
        "literal_type2_update": literal,
    }
