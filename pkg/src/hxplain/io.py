"""JSON documents for histories, explanations and run manifests.

Scores are stored twice: as an exact rational string (the value every
reader should trust) and as a rounded decimal for people. Files are written
to a temporary sibling and renamed into place, so a failed run never leaves a
partial file behind.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bhxp import Explanation, Step
from .core import FeatureSchema, History, TransitionModel, hashable_key
from .errors import SchemaMismatch
from .fhxp import ForwardExplanation
from .predicate import _jsonable, predicate_from_json
from .scoring import ScoringBudget, score_json

SCHEMA_VERSION = 1


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def write_json(path, obj) -> None:
    """Atomically write ``obj`` as JSON to ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(dumps(obj))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def manifest(command: str, env: str, config: dict, inputs: dict | None = None,
             deviations: list | None = None) -> dict:
    """Run record embedded in every output. ``inputs`` maps a role to a file path."""
    return {
        "command": command,
        "env": env,
        "config": config,
        "inputs": {role: file_digest(p) for role, p in sorted((inputs or {}).items())},
        "tool_version": __version__,
        "deviations": list(deviations or []),
    }


def parse_score(obj) -> Fraction:
    if isinstance(obj, dict):
        return Fraction(obj["exact"])
    return Fraction(obj)


# histories

def history_to_json(H: History, model: TransitionModel, run: dict | None = None) -> dict:
    doc = {
        "env": H.env_id,
        "schema_version": SCHEMA_VERSION,
        "env_config": model.config(),
        "features": H.schema.names,
        "states": [_jsonable(s) for s in H.states],
        "actions": list(H.actions),
        "terminal": bool(H.terminal),
    }
    if run is not None:
        doc["manifest"] = run
    return doc


def history_from_json(doc: dict, schema: FeatureSchema) -> History:
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaMismatch(f"unsupported history schema version {doc.get('schema_version')!r}")
    if doc.get("features") is not None and list(doc["features"]) != schema.names:
        raise SchemaMismatch("history features do not match the environment schema")
    states = [hashable_key(s) for s in doc["states"]]
    for s in states:
        schema.check(s)
    return History(schema, states, doc["actions"], doc["env"], bool(doc.get("terminal", False)))


# budgets

def budget_from_json(obj: dict) -> ScoringBudget:
    if obj.get("mode", "exhaustive") == "exhaustive":
        return ScoringBudget()
    return ScoringBudget.max_scenarios(int(obj["n"]), int(obj.get("seed", 0)))


# backward explanations

def explanation_to_json(E: Explanation, model: TransitionModel, config: dict,
                        run: dict | None = None) -> dict:
    steps = []
    for st in E.steps:
        steps.append({
            "window": list(st.window),
            "index": st.index,
            "action": st.action,
            "action_name": model.action_name(st.action),
            "score": score_json(st.score),
            "anchor_utility": score_json(st.anchor_utility),
            "predicate_studied": st.predicate_studied.to_json(),
            "predicate_next": None if st.predicate_next is None else st.predicate_next.to_json(),
            "predicate_next_text": None if st.predicate_next is None else st.predicate_next.describe(),
            "window_scores": [{"index": i, "score": score_json(v)}
                              for i, v in sorted(st.window_scores.items())],
        })
    doc = {
        "mode": "backward",
        "config": config,
        "steps": steps,
        "actions": E.actions,
        "predicates": [None if p is None else p.to_json() for p in E.predicates],
        "termination_reason": E.termination_reason,
        "deviations": list(E.deviations),
    }
    if run is not None:
        doc["manifest"] = run
    return doc


def explanation_from_json(doc: dict, schema: FeatureSchema, native_factory=None) -> Explanation:
    if doc.get("mode") != "backward":
        raise SchemaMismatch("not a backward explanation")

    def pred(obj):
        return None if obj is None else predicate_from_json(obj, schema, native_factory)

    steps = [Step(tuple(st["window"]), st["index"], st["action"], parse_score(st["score"]),
                  parse_score(st["anchor_utility"]), pred(st["predicate_studied"]),
                  pred(st["predicate_next"]),
                  {w["index"]: parse_score(w["score"]) for w in st.get("window_scores", [])})
             for st in doc["steps"]]
    return Explanation(steps, doc["termination_reason"], list(doc.get("deviations", [])))


# forward explanations

def forward_to_json(F: ForwardExplanation, model: TransitionModel, config: dict,
                    run: dict | None = None) -> dict:
    doc = {
        "mode": "forward",
        "config": config,
        "budget": F.budget.to_json(),
        "horizon": F.horizon,
        "scores": [{"index": i, "action": a, "action_name": model.action_name(a),
                    "score": score_json(s)}
                   for i, a, s in zip(F.indices, F.actions, F.scores)],
        "top_k": F.top_k,
        "horizon_convention": F.horizon_convention,
        "deviations": list(F.deviations),
    }
    if run is not None:
        doc["manifest"] = run
    return doc


def forward_from_json(doc: dict) -> ForwardExplanation:
    if doc.get("mode") != "forward":
        raise SchemaMismatch("not a forward explanation")
    rows = doc["scores"]
    offset = rows[0]["index"] if rows else 0
    return ForwardExplanation([parse_score(r["score"]) for r in rows], [r["action"] for r in rows],
                              budget_from_json(doc.get("budget", {})), doc.get("horizon"),
                              list(doc.get("deviations", [])), offset)
