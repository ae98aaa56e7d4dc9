"""
Instance & Report I/O

JSON boundary for instance files, plus the numpy-aware serializer every
JSON writer in the package goes through.
"""

import json
from pathlib import Path
from typing import Any

import numpy as np

from core.model import (
    UNDEFINED_LABEL,
    HypothesisClass,
    ImprovementGraph,
    Instance,
    LabelSpace,
)
from utils.validators import validate_instance_payload


# ============================================================
# JSON Serialization Boundary
# ============================================================

def json_safe(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, dict):
        return {k: json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(json_safe(obj), indent=2, ensure_ascii=False) + "\n"


def write_json(path, obj: Any) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


# ============================================================
# Instances
# ============================================================

def parse_instance(payload: dict) -> Instance:
    data = validate_instance_payload(payload)

    nodes = data["nodes"]
    node_index = {name: i for i, name in enumerate(nodes)}
    graph = ImprovementGraph.from_edges(
        nodes,
        [(node_index[e["from"]], node_index[e["to"]], e["cost"]) for e in data["edges"]],
    )

    labels = LabelSpace(
        names=tuple(lab["name"] for lab in data["labels"]),
        values=tuple(lab["value"] for lab in data["labels"]),
    )
    label_index = {name: i for i, name in enumerate(labels.names)}

    table = np.full((len(data["hypotheses"]), len(nodes)), UNDEFINED_LABEL, dtype=np.int16)
    for i, hyp in enumerate(data["hypotheses"]):
        for node, label in hyp["labeling"].items():
            table[i, node_index[node]] = label_index[label]

    hypotheses = HypothesisClass(
        names=tuple(h["name"] for h in data["hypotheses"]),
        table=table,
        k=labels.k,
    )
    return Instance(graph, labels, hypotheses, name=str(data["name"]))


def instance_to_payload(instance: Instance) -> dict:
    graph, labels, hyps = instance.graph, instance.labels, instance.hypotheses
    return {
        "name": instance.name,
        "nodes": list(graph.nodes),
        "edges": [
            {"from": graph.nodes[x], "to": graph.nodes[v], "cost": c}
            for x, v, c in graph.edges()
        ],
        "labels": [
            {"name": name, "value": value}
            for name, value in zip(labels.names, labels.values)
        ],
        "hypotheses": [
            {
                "name": name,
                "labeling": {
                    graph.nodes[x]: labels.names[y]
                    for x, y in enumerate(hyps.table[i].tolist())
                    if y != UNDEFINED_LABEL
                },
            }
            for i, name in enumerate(hyps.names)
        ],
    }


def load_instance(path) -> Instance:
    instance = parse_instance(read_json(path))
    if instance.name == "instance":
        instance.name = Path(path).stem
    return instance


def dump_instance(instance: Instance, path=None) -> str:
    text = dumps(instance_to_payload(instance))
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
