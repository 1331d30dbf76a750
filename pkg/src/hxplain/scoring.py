"""Utility of frontiers and action importance.

Importance of action ``a`` from ``s`` at horizon ``k``: the probability that
``d`` holds after one transition through ``(s, a)`` followed by ``k`` policy
steps, minus the mean of that probability over the other available actions.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    ONE,
    ZERO,
    Dynamics,
    Policy,
    State,
    TransitionModel,
    WeightedStates,
    succ,
    support,
)
from .errors import IllegalAction
from .predicate import Predicate
from .rng import stable_digest, substream

Score = Fraction


@dataclass(frozen=True)
class ScoringBudget:
    """``exhaustive`` or ``max_scenarios`` (seeded scenario sampling)."""

    mode: str = "exhaustive"
    n: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("exhaustive", "max_scenarios"):
            raise ValueError(f"unknown budget mode {self.mode!r}")
        if self.mode == "max_scenarios" and (self.n is None or self.n < 1):
            raise ValueError("max_scenarios budget needs n >= 1")

    @classmethod
    def exhaustive(cls) -> "ScoringBudget":
        return cls()

    @classmethod
    def max_scenarios(cls, n: int, seed: int = 0) -> "ScoringBudget":
        return cls("max_scenarios", n, seed)

    def to_json(self) -> dict:
        if self.mode == "exhaustive":
            return {"mode": "exhaustive"}
        return {"mode": "max_scenarios", "n": self.n, "seed": self.seed}


EXHAUSTIVE = ScoringBudget()


def worker_count() -> int:
    """Thread cap from ``HXPLAIN_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("HXPLAIN_THREADS", "1")))
    except ValueError:
        return 1


def score_json(x: Fraction) -> dict:
    return {"exact": str(x), "decimal": round(float(x), 6)}


def utility(frontier: WeightedStates, d: Predicate) -> Fraction:
    """Probability mass of the frontier states satisfying ``d``."""
    total = ZERO
    for s, pr in frontier.items():
        if d(s):
            total += pr
    return total


def state_utility(model: TransitionModel, policy: Policy, s: State, d: Predicate, k: int,
                  dynamics: Dynamics | None = None) -> Fraction:
    dyn = dynamics or Dynamics(model, policy)
    return utility(succ(model, policy, WeightedStates.point(s), k, dyn), d)


def scenario_count(dyn: Dynamics, s: State, a: int, k: int) -> int:
    """Number of distinct length-(k+1) scenarios starting with ``(s, a)``."""
    counts: dict[State, int] = {}
    for s2, _ in dyn.action_support(s, a):
        counts[s2] = counts.get(s2, 0) + 1
    for _ in range(k):
        nxt: dict[State, int] = {}
        for s2, c in counts.items():
            for s3, _ in dyn.step(s2):
                nxt[s3] = nxt.get(s3, 0) + c
        counts = nxt
    return sum(counts.values())


def _draw(rng, pairs) -> State:
    u = Fraction(float(rng.random()))
    acc = ZERO
    for st, p in pairs:
        acc += p
        if u < acc:
            return st
    return pairs[-1][0]


def branch_utility(dyn: Dynamics, s: State, a: int, d: Predicate, k: int,
                   budget: ScoringBudget = EXHAUSTIVE) -> Fraction:
    """``u_d(succ^k(S_(s,a)))``, exact or estimated from sampled scenarios.

    With a scenario budget at least the branch's scenario count the exact
    value is returned, so the estimate coincides with exhaustive scoring.
    """
    first = support(dyn.model, s, a)
    if budget.mode == "exhaustive" or scenario_count(dyn, s, a, k) <= budget.n:
        return utility(succ(dyn.model, dyn.policy, first, k, dyn), d)
    rng = substream(budget.seed, "scenario", stable_digest(s), a, k)
    pairs = tuple(first.items())
    hits = 0
    for _ in range(budget.n):
        cur = _draw(rng, pairs)
        for _ in range(k):
            cur = _draw(rng, dyn.step(cur))
        if d(cur):
            hits += 1
    return Fraction(hits, budget.n)


@dataclass(frozen=True)
class ImportanceDetail:
    score: Fraction
    chosen: Fraction
    alternatives: dict
    single_action: bool


def importance_detail(model: TransitionModel, policy: Policy, s: State, a: int, d: Predicate,
                      k: int, budget: ScoringBudget = EXHAUSTIVE,
                      dynamics: Dynamics | None = None) -> ImportanceDetail:
    if k < 0:
        raise ValueError("horizon must be non-negative")
    acts = model.actions(s)
    if a not in acts:
        raise IllegalAction(f"action {a!r} not available in {s!r}")
    dyn = dynamics or Dynamics(model, policy)
    others = [b for b in acts if b != a]
    branches = [a] + others
    n_workers = min(worker_count(), len(branches))
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            utils = list(pool.map(lambda b: branch_utility(dyn, s, b, d, k, budget), branches))
    else:
        utils = [branch_utility(dyn, s, b, d, k, budget) for b in branches]
    chosen, alt = utils[0], dict(zip(others, utils[1:]))
    # An empty average is taken as zero, so a forced move scores its own utility.
    mean_alt = sum(alt.values(), ZERO) / len(alt) if alt else ZERO
    score = chosen - mean_alt
    if not -ONE <= score <= ONE:
        raise AssertionError(f"importance {score} outside [-1, 1]")
    return ImportanceDetail(score, chosen, alt, not alt)


def importance(model: TransitionModel, policy: Policy, s: State, a: int, d: Predicate, k: int,
               budget: ScoringBudget = EXHAUSTIVE, dynamics: Dynamics | None = None) -> Score:
    return importance_detail(model, policy, s, a, d, k, budget, dynamics).score
