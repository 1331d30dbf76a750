"""Brute-force reference computations for tests.

Nothing here touches the frontier machinery: scenarios are enumerated one
path at a time with no state merging, and abductive checks recount the
whole match set with utilities recomputed from scenarios.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .core import FeatureSchema, Policy, State, TabularModel, TabularPolicy, TransitionModel
from .errors import TooLarge
from .predicate import Dnf, Literal, Predicate, Term

SCENARIO_LIMIT = 10 ** 6


@dataclass(frozen=True)
class ScenarioTrace:
    steps: tuple  # ((state, step probability), ...)
    probability: Fraction

    @property
    def final(self) -> State:
        return self.steps[-1][0]


def scenarios(model: TransitionModel, policy: Policy, s: State, a: int, k: int,
              limit: int = SCENARIO_LIMIT):
    """Yield every length-(k+1) scenario that starts by playing ``a`` in ``s``."""
    count = 0
    stack = [((st, p),) for st, p in reversed(list(model.support(s, a).items()))]
    while stack:
        path = stack.pop()
        if len(path) == k + 1:
            count += 1
            if count > limit:
                raise TooLarge(f"more than {limit} scenarios")
            prob = Fraction(1)
            for _, p in path:
                prob *= p
            yield ScenarioTrace(path, prob)
            continue
        x = path[-1][0]
        nxt = list(model.support(x, policy(x)).items())
        for st, p in reversed(nxt):
            stack.append(path + ((st, p),))


def oracle_branch_utility(model, policy, s, a, d, k, limit=SCENARIO_LIMIT) -> Fraction:
    return sum((t.probability for t in scenarios(model, policy, s, a, k, limit) if d(t.final)),
               Fraction(0))


def oracle_state_utility(model, policy, s, d, k, limit=SCENARIO_LIMIT) -> Fraction:
    if k == 0:
        return Fraction(1) if d(s) else Fraction(0)
    return oracle_branch_utility(model, policy, s, policy(s), d, k - 1, limit)


def oracle_importance(model: TransitionModel, policy: Policy, s: State, a: int, d: Predicate,
                      k: int, limit: int = SCENARIO_LIMIT) -> Fraction:
    chosen = oracle_branch_utility(model, policy, s, a, d, k, limit)
    alts = [oracle_branch_utility(model, policy, s, b, d, k, limit)
            for b in model.actions(s) if b != a]
    if not alts:
        return chosen
    return chosen - sum(alts, Fraction(0)) / len(alts)


def _labeller(kappa):
    """Recompute classifier labels from scenarios when ``kappa`` is a utility classifier."""
    if hasattr(kappa, "anchor") and hasattr(kappa, "model"):
        model, policy, d, k = kappa.model, kappa.policy, kappa.d, kappa.k
        threshold = oracle_state_utility(model, policy, kappa.anchor, d, k)
        cache = {}

        def label(x):
            if x not in cache:
                cache[x] = oracle_state_utility(model, policy, x, d, k) >= threshold
            return cache[x]
        return label, model.schema
    return kappa, None


def oracle_paxp_check(kappa, v: State, X, delta, schema: FeatureSchema | None = None,
                      limit: int = SCENARIO_LIMIT):
    """Exhaustive weak-explanation test.

    Returns ``(is_weak, counterexample)``; the counterexample is the first
    completion labelled False and is only reported for ``delta == 1``.
    """
    label, kschema = _labeller(kappa)
    schema = schema or kschema
    X = set(X)
    free = [i for i in schema.explainable if i not in X]
    size = 1
    for i in free:
        size *= len(schema.domain(i))
    if size > limit:
        raise TooLarge(f"{size} matching points exceed the guard")
    total = hits = 0
    first_bad = None
    for values in itertools.product(*(schema.domain(i) for i in free)):
        x = list(v)
        for i, val in zip(free, values):
            x[i] = val
        x = tuple(x)
        total += 1
        if label(x):
            hits += 1
        elif first_bad is None:
            first_bad = x
    weak = Fraction(hits, total) >= Fraction(delta)
    counterexample = first_bad if Fraction(delta) == 1 else None
    return weak, counterexample


def oracle_minimal_paxps(kappa, v, delta, schema: FeatureSchema | None = None) -> set:
    """Subset-minimal weak sets by checking every subset against all its subsets."""
    label, kschema = _labeller(kappa)
    schema = schema or kschema
    feats = schema.explainable
    weak = {}
    for r in range(len(feats) + 1):
        for combo in itertools.combinations(feats, r):
            weak[frozenset(combo)] = oracle_paxp_check(label, v, combo, delta, schema)[0]
    out = set()
    for X, ok in weak.items():
        if ok and not any(weak[frozenset(c)] for r in range(len(X))
                          for c in itertools.combinations(sorted(X), r)):
            out.add(X)
    return out


def random_tabular_instance(rng: random.Random, max_states: int = 20, max_branch: int = 3,
                            max_actions: int = 3):
    """Random small MDP with a random deterministic policy and a random Dnf predicate.

    Returns ``(model, policy, predicate)``.
    """
    n = rng.randint(2, max_states)
    table = {}
    for s in range(n):
        table[s] = {}
        for a in range(rng.randint(1, max_actions)):
            m = rng.randint(1, min(max_branch, n))
            targets = rng.sample(range(n), m)
            weights = [rng.randint(1, 6) for _ in targets]
            tot = sum(weights)
            table[s][a] = [(t, Fraction(w, tot)) for t, w in zip(targets, weights)]
    model = TabularModel(n, table)
    choice = {(s,): rng.choice(sorted(table[s])) for s in range(n)}
    policy = TabularPolicy(choice, meta={"type": "tabular"})
    goal = rng.sample(range(n), rng.randint(1, max(1, n // 3)))
    pred = Dnf(model.schema, [Term([Literal(0, g)]) for g in sorted(goal)])
    return model, policy, pred
