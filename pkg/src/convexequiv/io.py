"""Text documents for bodies, transforms and scenarios.

Numbers are written with 17 significant digits, which round-trips every
double exactly.  Documents are JSON objects tagged by a ``type`` field;
readers also accept untagged objects with the expected fields.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .body import ConvexBody
from .transforms import AffineTransform

__all__ = [
    "fmt",
    "dumps",
    "body_doc",
    "transform_doc",
    "scenario_doc",
    "read_body",
    "read_transform",
    "read_scenario",
    "load_document",
    "write_document",
]


def fmt(x: float) -> str:
    """17-significant-digit numeral; integers stay integral."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not np.isfinite(x):
        raise ValueError("non-finite numbers have no document form")
    s = format(x, ".17g")
    # keep floats recognizable as floats when parsed back
    if all(ch not in s for ch in ".eEn"):
        s += ".0"
    return s


def _emit(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if all(isinstance(v, (int, float, np.floating, np.integer)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(fmt(v) for v in obj) + "]"
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + _emit(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    return fmt(obj)


def dumps(obj: Any, indent: int = 2) -> str:
    return _emit(obj, indent, 0) + "\n"


def body_doc(body: ConvexBody) -> dict:
    return {"type": "body", "dim": body.dim_ambient, "vertices": body.vertices}


def transform_doc(g: AffineTransform) -> dict:
    return {"type": "transform", "matrix": g.matrix, "translation": g.translation}


def scenario_doc(scenario) -> dict:
    pairs = []
    for body, target in scenario.pairs:
        t = body_doc(target) if isinstance(target, ConvexBody) else np.asarray(target)
        pairs.append({"body": body_doc(body), "target": t})
    doc = {
        "type": "scenario",
        "group": scenario.group.value,
        "base_selector": scenario.base_selector.value,
        "pairs": pairs,
    }
    if scenario.deltas is not None:
        doc["delta"] = list(scenario.deltas)
    return doc


def load_document(source, base_dir: Path | None = None) -> Any:
    """Parse an inline JSON document, or read one from a path."""
    if isinstance(source, (dict, list)):
        return source
    text = str(source).strip()
    if text.startswith(("{", "[")):
        return json.loads(text)
    path = Path(text)
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    return json.loads(path.read_text())


def write_document(doc: dict, path) -> None:
    Path(path).write_text(dumps(doc))


def _base_dir(source) -> Path | None:
    if isinstance(source, (str, Path)) and not str(source).strip().startswith(("{", "[")):
        return Path(source).parent
    return None


def read_body(source, base_dir: Path | None = None) -> ConvexBody:
    doc = load_document(source, base_dir)
    if isinstance(doc, list):
        return ConvexBody(doc)
    if doc.get("type", "body") != "body" or "vertices" not in doc:
        raise ValueError("not a body document")
    body = ConvexBody(doc["vertices"])
    if "dim" in doc and int(doc["dim"]) != body.dim_ambient:
        raise ValueError("declared dim disagrees with the vertex coordinates")
    return body


def read_transform(source) -> AffineTransform:
    doc = load_document(source)
    if doc.get("type", "transform") != "transform":
        raise ValueError("not a transform document")
    return AffineTransform(np.array(doc["matrix"], dtype=float), np.array(doc["translation"], dtype=float))


def read_scenario(source):
    from .blend import Scenario

    doc = load_document(source)
    base = _base_dir(source)
    if doc.get("type", "scenario") != "scenario":
        raise ValueError("not a scenario document")
    pairs = []
    for item in doc["pairs"]:
        body = read_body(item["body"], base)
        target = item["target"]
        if isinstance(target, dict) or (isinstance(target, str)):
            target = read_body(target, base)
        else:
            target = np.asarray(target, dtype=float)
        pairs.append((body, target))
    return Scenario(
        group=doc["group"],
        pairs=tuple(pairs),
        base_selector=doc.get("base_selector", "steiner"),
        deltas=doc.get("delta"),
    )
