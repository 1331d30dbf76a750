"""Predicates over states.

Two concrete forms exist: :class:`Dnf`, a disjunction of conjunctions of
``feature == value`` literals (the shape produced by abductive predicate
redefinition), and :class:`Native`, an environment-provided boolean function
whose context (e.g. a reference board) is captured at construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .core import FeatureSchema, State, hashable_key
from .errors import SchemaMismatch, UnknownPredicate


@dataclass(frozen=True, order=True)
class Literal:
    feature: int
    value: object

    def holds(self, s: State) -> bool:
        return s[self.feature] == self.value


class Term:
    """Conjunction of literals, at most one per feature. Empty means True."""

    __slots__ = ("literals",)

    def __init__(self, literals: Iterable[Literal] = ()):
        lits = tuple(sorted(literals, key=lambda l: l.feature))
        seen = {l.feature for l in lits}
        if len(seen) != len(lits):
            raise ValueError("a term may constrain each feature at most once")
        self.literals = lits

    @property
    def features(self) -> frozenset[int]:
        return frozenset(l.feature for l in self.literals)

    def holds(self, s: State) -> bool:
        for l in self.literals:
            if s[l.feature] != l.value:
                return False
        return True

    def __eq__(self, other):
        return isinstance(other, Term) and self.literals == other.literals

    def __hash__(self):
        return hash(self.literals)

    def __len__(self):
        return len(self.literals)

    def __repr__(self):
        return f"Term({list(self.literals)!r})"


class Predicate:
    schema: FeatureSchema | None = None

    def holds(self, s: State) -> bool:
        raise NotImplementedError

    def __call__(self, s: State) -> bool:
        return self.holds(s)

    def to_json(self) -> dict:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


class Dnf(Predicate):
    """Disjunction of :class:`Term`. ``Dnf(schema, [])`` is constant False."""

    def __init__(self, schema: FeatureSchema, terms: Iterable[Term]):
        self.schema = schema
        self.terms = tuple(terms)
        for t in self.terms:
            for l in t.literals:
                if not 0 <= l.feature < schema.arity:
                    raise SchemaMismatch(f"literal on unknown feature index {l.feature}")
                if not schema.in_domain(l.feature, l.value):
                    raise SchemaMismatch(
                        f"value {l.value!r} outside domain of {schema.features[l.feature].name}")

    def holds(self, s: State) -> bool:
        for t in self.terms:
            if t.holds(s):
                return True
        return False

    @property
    def is_true(self) -> bool:
        return any(len(t) == 0 for t in self.terms)

    @property
    def is_false(self) -> bool:
        return not self.terms

    def features(self) -> frozenset[int]:
        out: set[int] = set()
        for t in self.terms:
            out |= t.features
        return frozenset(out)

    def to_json(self) -> dict:
        names = self.schema.names
        return {"type": "dnf",
                "terms": [[{"feature": names[l.feature], "value": _jsonable(l.value)}
                           for l in t.literals] for t in self.terms]}

    def describe(self) -> str:
        if self.is_false:
            return "False"
        names = self.schema.names
        parts = []
        for t in self.terms:
            if not t.literals:
                parts.append("True")
            else:
                parts.append(" & ".join(f"({names[l.feature]}={_fmt(l.value)})" for l in t.literals))
        return " | ".join(parts)

    def __eq__(self, other):
        return (isinstance(other, Dnf) and self.terms == other.terms
                and self.schema == other.schema)

    def __hash__(self):
        return hash(("dnf", self.terms))

    def __repr__(self):
        return f"Dnf({self.describe()})"


class Native(Predicate):
    """Environment predicate identified by ``(env, name, params)``."""

    def __init__(self, env: str, name: str, fn: Callable[[State], bool],
                 params: dict | None = None, schema: FeatureSchema | None = None):
        self.env = env
        self.name = name
        self.params = dict(params or {})
        self.schema = schema
        self._fn = fn

    def holds(self, s: State) -> bool:
        return bool(self._fn(s))

    def to_json(self) -> dict:
        return {"type": "native", "env": self.env, "name": self.name,
                "params": _jsonable(self.params)}

    def describe(self) -> str:
        shown = {k: v for k, v in self.params.items() if k != "reference"}
        return self.name if not shown else f"{self.name}{_jsonable(shown)}"

    def __eq__(self, other):
        return (isinstance(other, Native) and self.env == other.env and self.name == other.name
                and _jsonable(self.params) == _jsonable(other.params))

    def __hash__(self):
        return hash(("native", self.env, self.name))

    def __repr__(self):
        return f"Native({self.env}:{self.describe()})"


def evaluate(d: Predicate, s: State) -> bool:
    """Evaluate ``d`` on ``s`` after an arity check against ``d``'s schema."""
    if d.schema is not None and len(s) != d.schema.arity:
        raise SchemaMismatch(f"state arity {len(s)} does not match schema arity {d.schema.arity}")
    return d.holds(s)


def term_from_assignment(features: Iterable[int], s: State) -> Term:
    """The term fixing exactly ``features`` to their values in ``s``."""
    return Term(Literal(i, s[i]) for i in sorted(set(features)))


def true_predicate(schema: FeatureSchema) -> Dnf:
    return Dnf(schema, [Term()])


def false_predicate(schema: FeatureSchema) -> Dnf:
    return Dnf(schema, [])


def dnf_from_json(obj: dict, schema: FeatureSchema) -> Dnf:
    terms = []
    for raw in obj["terms"]:
        terms.append(Term(Literal(schema.index(lit["feature"]), hashable_key(lit["value"]))
                          for lit in raw))
    return Dnf(schema, terms)


def predicate_from_json(obj: dict, schema: FeatureSchema,
                        native_factory: Callable[[str, dict], Predicate] | None = None) -> Predicate:
    kind = obj.get("type")
    if kind == "dnf":
        return dnf_from_json(obj, schema)
    if kind == "native":
        if native_factory is None:
            raise UnknownPredicate("no environment available to rebuild a native predicate")
        return native_factory(obj["name"], obj.get("params") or {})
    raise UnknownPredicate(f"unknown predicate type {kind!r}")


def _jsonable(v):
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def _fmt(v) -> str:
    if isinstance(v, tuple):
        return "(" + ",".join(_fmt(x) for x in v) + ")"
    return str(v)
