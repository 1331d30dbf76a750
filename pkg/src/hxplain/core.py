"""States, weighted frontiers, histories, policies and the next/succ operators.

A state is a plain tuple of feature values, positionally aligned with a
:class:`FeatureSchema`. Probabilities are :class:`fractions.Fraction` from
end to end; nothing in the scoring path ever rounds.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import (
    BudgetExhausted,
    EmptyHistory,
    IllegalAction,
    PolicyUndefined,
    SchemaMismatch,
)

State = tuple
Prob = Fraction
ActionId = int

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Feature:
    name: str
    domain: tuple
    # Hidden features carry dynamics context (e.g. positions of other agents).
    # They are never freed or named by abductive explanations.
    hidden: bool = False

    def __post_init__(self):
        if not self.domain:
            raise ValueError(f"feature {self.name!r} has an empty domain")
        if len(set(self.domain)) != len(self.domain):
            raise ValueError(f"feature {self.name!r} has duplicate domain values")


class FeatureSchema:
    """Ordered, immutable list of named features with finite domains."""

    def __init__(self, features: Iterable[Feature]):
        self.features: tuple[Feature, ...] = tuple(features)
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise ValueError("feature names must be unique")
        self._index = {n: i for i, n in enumerate(names)}
        self._domain_sets = [frozenset(f.domain) for f in self.features]
        self.explainable: tuple[int, ...] = tuple(
            i for i, f in enumerate(self.features) if not f.hidden)

    @property
    def arity(self) -> int:
        return len(self.features)

    @property
    def names(self) -> list[str]:
        return [f.name for f in self.features]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SchemaMismatch(f"unknown feature {name!r}") from None

    def domain(self, i: int) -> tuple:
        return self.features[i].domain

    def in_domain(self, i: int, value) -> bool:
        return value in self._domain_sets[i]

    def check(self, state: State) -> None:
        if len(state) != self.arity:
            raise SchemaMismatch(f"state has {len(state)} values, schema has {self.arity}")
        for i, v in enumerate(state):
            if v not in self._domain_sets[i]:
                raise SchemaMismatch(
                    f"value {v!r} outside domain of feature {self.features[i].name!r}")

    def space_size(self, indices: Iterable[int] | None = None) -> int:
        idx = self.explainable if indices is None else indices
        size = 1
        for i in idx:
            size *= len(self.features[i].domain)
        return size

    def describe(self, state: State) -> dict:
        return {f.name: v for f, v in zip(self.features, state)}

    def __eq__(self, other):
        return isinstance(other, FeatureSchema) and self.features == other.features

    def __hash__(self):
        return hash(self.features)

    def __repr__(self):
        return f"FeatureSchema({self.names})"


class WeightedStates:
    """A frontier: states mapped to strictly positive exact probabilities.

    Duplicate states are merged by summing their probabilities. Iteration
    order is insertion order, which is deterministic for deterministic models.
    """

    __slots__ = ("_entries", "complete")

    def __init__(self, entries: Mapping[State, Fraction] | Iterable[tuple[State, Fraction]] = (),
                 complete: bool = True):
        acc: dict[State, Fraction] = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for s, p in items:
            p = Fraction(p)
            if p < 0:
                raise ValueError("negative probability")
            if p == 0:
                continue
            acc[s] = acc.get(s, ZERO) + p
        self._entries = acc
        self.complete = complete

    @classmethod
    def point(cls, state: State) -> "WeightedStates":
        return cls({state: ONE})

    @classmethod
    def _trusted(cls, entries: dict, complete: bool) -> "WeightedStates":
        ws = cls.__new__(cls)
        ws._entries = entries
        ws.complete = complete
        return ws

    def mass(self) -> Fraction:
        return sum(self._entries.values(), ZERO)

    def items(self):
        return self._entries.items()

    def states(self) -> list[State]:
        return list(self._entries)

    def get(self, state: State, default=ZERO) -> Fraction:
        return self._entries.get(state, default)

    def as_dict(self) -> dict[State, Fraction]:
        return dict(self._entries)

    def __contains__(self, state) -> bool:
        return state in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[State]:
        return iter(self._entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedStates):
            return NotImplemented
        return self._entries == other._entries

    def __repr__(self) -> str:
        body = ", ".join(f"{s!r}: {p}" for s, p in self._entries.items())
        return f"WeightedStates({{{body}}})"


class TransitionModel(ABC):
    """Known environment dynamics seen from the explained agent.

    Subclasses supply the schema, the stable action list of each state and the
    exact successor distribution of each legal (state, action) pair.
    """

    env_id: str = "abstract"
    schema: FeatureSchema

    @abstractmethod
    def actions(self, s: State) -> list[ActionId]:
        ...

    @abstractmethod
    def support(self, s: State, a: ActionId) -> WeightedStates:
        ...

    @abstractmethod
    def branching_bound(self) -> int:
        ...

    def initial_state(self) -> State:
        raise NotImplementedError(f"{type(self).__name__} has no default start state")

    def reward(self, s: State, a: ActionId) -> Fraction:
        return ZERO

    def is_valid(self, s: State) -> bool:
        """Whether ``s`` is a genuine state (as opposed to any feature point)."""
        return True

    def is_terminal(self, s: State) -> bool:
        return False

    def action_name(self, a: ActionId) -> str:
        return str(a)

    def config(self) -> dict:
        """JSON-serialisable parameters sufficient to rebuild the model."""
        return {}


class Policy:
    """Deterministic policy: a callable from states to action ids."""

    def __init__(self, fn: Callable[[State], ActionId] | None = None, meta: dict | None = None):
        self._fn = fn
        self.meta = dict(meta or {})

    def act(self, s: State) -> ActionId:
        if self._fn is None:
            raise NotImplementedError
        return self._fn(s)

    def __call__(self, s: State) -> ActionId:
        return self.act(s)


class TabularPolicy(Policy):
    def __init__(self, table: Mapping[State, ActionId], meta: dict | None = None):
        super().__init__(meta=meta)
        self.table = dict(table)

    def act(self, s: State) -> ActionId:
        try:
            return self.table[s]
        except KeyError:
            raise PolicyUndefined(f"policy undefined on {s!r}") from None


def support(model: TransitionModel, s: State, a: ActionId) -> WeightedStates:
    """Checked access to the successor distribution of ``(s, a)``."""
    if a not in model.actions(s):
        raise IllegalAction(f"action {a!r} not available in {s!r}")
    return model.support(s, a)


class Dynamics:
    """Memoised closed-loop successor distribution ``s -> p(.|s, pi(s))``.

    One instance per (model, policy) pair; the cache is keyed by state only.
    Concurrent readers may compute the same entry twice but always store
    the same value.
    """

    def __init__(self, model: TransitionModel, policy: Policy, max_frontier: int | None = None):
        self.model = model
        self.policy = policy
        self.max_frontier = max_frontier
        self._cache: dict[State, tuple] = {}

    def step(self, s: State) -> tuple:
        hit = self._cache.get(s)
        if hit is None:
            try:
                a = self.policy(s)
            except PolicyUndefined:
                raise
            except KeyError as exc:
                raise PolicyUndefined(f"policy undefined on {s!r}") from exc
            if a is None:
                raise PolicyUndefined(f"policy undefined on {s!r}")
            hit = tuple(support(self.model, s, a).items())
            self._cache[s] = hit
        return hit

    def action_support(self, s: State, a: ActionId) -> tuple:
        return tuple(support(self.model, s, a).items())

    def clear(self) -> None:
        self._cache.clear()


def next_states(model: TransitionModel, policy: Policy, frontier: WeightedStates,
                dynamics: Dynamics | None = None) -> WeightedStates:
    """One closed-loop step of every frontier state, merging equal successors."""
    dyn = dynamics or Dynamics(model, policy)
    acc: dict[State, Fraction] = {}
    for s, pr in frontier.items():
        for s2, p in dyn.step(s):
            acc[s2] = acc.get(s2, ZERO) + pr * p
    if dyn.max_frontier is not None and len(acc) > dyn.max_frontier:
        raise BudgetExhausted(
            f"frontier of {len(acc)} states exceeds the cap of {dyn.max_frontier}")
    return WeightedStates._trusted(acc, frontier.complete)


def succ(model: TransitionModel, policy: Policy, frontier: WeightedStates, k: int,
         dynamics: Dynamics | None = None) -> WeightedStates:
    """Apply :func:`next_states` ``k`` times (``k = 0`` returns the input)."""
    if k < 0:
        raise ValueError("horizon must be non-negative")
    dyn = dynamics or Dynamics(model, policy)
    for _ in range(k):
        frontier = next_states(model, policy, frontier, dyn)
    return frontier


@dataclass
class History:
    """Alternating states and actions ``(s0, a0, ..., a_{k-1}, s_k)``."""

    schema: FeatureSchema
    states: list
    actions: list
    env_id: str
    terminal: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.states = [tuple(s) for s in self.states]
        self.actions = [int(a) for a in self.actions]
        if not self.actions:
            raise EmptyHistory("a history needs at least one action")
        if len(self.states) != len(self.actions) + 1:
            raise SchemaMismatch("a history needs exactly one more state than actions")

    @property
    def k(self) -> int:
        return len(self.actions)

    def validate(self, model: TransitionModel) -> None:
        """Check conformity and that every transition has non-zero probability."""
        if model.schema != self.schema:
            raise SchemaMismatch("history schema differs from the model schema")
        for s in self.states:
            self.schema.check(s)
        for i, a in enumerate(self.actions):
            if a not in model.actions(self.states[i]):
                raise SchemaMismatch(f"action {a} illegal at step {i}")
            if self.states[i + 1] not in model.support(self.states[i], a):
                raise SchemaMismatch(f"state {i + 1} is not a successor of state {i}")


class TabularModel(TransitionModel):
    """Explicit finite MDP over single-feature states ``(id,)``.

    ``table[s][a]`` is a list of ``(successor id, probability)`` pairs. Used by
    toy fixtures and random-instance tests.
    """

    env_id = "tabular"

    def __init__(self, n_states: int, table: Mapping[int, Mapping[int, Sequence[tuple[int, Fraction]]]]):
        self.n_states = n_states
        self.schema = FeatureSchema([Feature("S", tuple(range(n_states)))])
        self.table = {s: {a: list(out) for a, out in acts.items()} for s, acts in table.items()}
        for s, acts in self.table.items():
            if not acts:
                raise ValueError(f"state {s} has no actions")
            for a, out in acts.items():
                if sum((Fraction(p) for _, p in out), ZERO) != 1:
                    raise ValueError(f"support of ({s}, {a}) does not sum to one")

    def actions(self, s: State) -> list[ActionId]:
        return sorted(self.table[s[0]])

    def support(self, s: State, a: ActionId) -> WeightedStates:
        acts = self.table[s[0]]
        if a not in acts:
            raise IllegalAction(f"action {a} not available in {s}")
        return WeightedStates(((t,), Fraction(p)) for t, p in acts[a])

    def branching_bound(self) -> int:
        return max(len(out) for acts in self.table.values() for out in acts.values())

    def config(self) -> dict:
        return {"n_states": self.n_states,
                "table": {str(s): {str(a): [[t, str(Fraction(p))] for t, p in out]
                                   for a, out in acts.items()}
                          for s, acts in self.table.items()}}


def deterministic_chain(n: int, extra_actions: int = 0) -> TabularModel:
    """Chain ``0 -> 1 -> ... -> n-1`` (absorbing end) under action 0.

    Each ``extra_actions`` alternative stays in place.
    """
    table: dict[int, dict[int, list]] = {}
    for s in range(n):
        nxt = min(s + 1, n - 1)
        table[s] = {0: [(nxt, ONE)]}
        for a in range(1, extra_actions + 1):
            table[s][a] = [(s, ONE)]
    return TabularModel(n, table)


def constant_policy(action: ActionId = 0, meta: dict | None = None) -> Policy:
    return Policy(lambda s: action, meta={"type": "constant", "action": action, **(meta or {})})


def hashable_key(value: Any) -> Hashable:
    """Recursively turn JSON lists back into tuples."""
    if isinstance(value, list):
        return tuple(hashable_key(v) for v in value)
    return value
