"""Probabilistic abductive explanations of the utility classifier.

The classifier labels a point ``x`` of feature space True when its utility
for ``d`` at horizon ``k`` is at least the anchor's. A feature subset ``X``
is a *weak* explanation at threshold ``delta`` when at least a ``delta``
fraction of the points agreeing with the anchor on ``X`` are labelled True.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import Dynamics, FeatureSchema, Policy, State, TransitionModel, ZERO
from .errors import EmptyMatchSet, SpaceTooLarge
from .predicate import Dnf, Predicate, term_from_assignment
from .rng import stable_digest, substream
from .scoring import state_utility

FeatureSubset = frozenset


class BhxpClassifier:
    """``x -> u^k_d(x) >= u^k_d(anchor)`` with a per-instance utility memo."""

    def __init__(self, anchor: State, model: TransitionModel, policy: Policy, d: Predicate,
                 k: int, dynamics: Dynamics | None = None):
        self.anchor = tuple(anchor)
        self.model = model
        self.policy = policy
        self.d = d
        self.k = k
        self.dynamics = dynamics or Dynamics(model, policy)
        self._memo: dict = {}
        self.threshold = state_utility(model, policy, self.anchor, d, k, self.dynamics)
        self.evaluations = 0

    @property
    def schema(self) -> FeatureSchema:
        return self.model.schema

    def utility(self, x: State, depth: int | None = None) -> Fraction:
        """``u^depth_d(x)`` by memoised backward recursion over successors."""
        depth = self.k if depth is None else depth
        key = (x, depth)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if depth == 0:
            val = Fraction(1) if self.d(x) else ZERO
        else:
            val = ZERO
            for x2, p in self.dynamics.step(x):
                val += p * self.utility(x2, depth - 1)
        self._memo[key] = val
        return val

    def __call__(self, x: State) -> bool:
        self.evaluations += 1
        if self.threshold == 0:
            return True
        return self.utility(tuple(x)) >= self.threshold


def classify(kappa: BhxpClassifier, x: State) -> bool:
    return kappa(x)


@dataclass(frozen=True)
class PaxpConfig:
    delta: Fraction = Fraction(1)
    proportion_mode: str = "exhaustive"  # or "sampled"
    sample: int = 10
    seed: int = 0
    feature_order: tuple | None = None
    sample_space: str = "feature_space"  # or "valid_states"
    max_points: int = 2_000_000
    enumeration_cap: int = 100_000

    def __post_init__(self):
        object.__setattr__(self, "delta", Fraction(self.delta))
        if not 0 <= self.delta <= 1:
            raise ValueError("delta must lie in [0, 1]")
        if self.proportion_mode not in ("exhaustive", "sampled"):
            raise ValueError(f"unknown proportion mode {self.proportion_mode!r}")
        if self.sample_space not in ("feature_space", "valid_states"):
            raise ValueError(f"unknown sample space {self.sample_space!r}")
        if self.sample < 1:
            raise ValueError("sample must be >= 1")

    def order(self, schema: FeatureSchema) -> tuple:
        if self.feature_order is None:
            return schema.explainable
        order = tuple(self.feature_order)
        if sorted(order) != sorted(schema.explainable):
            raise ValueError("feature_order must be a permutation of the explainable features")
        return order

    def to_json(self) -> dict:
        out = {"delta": str(self.delta), "proportion_mode": self.proportion_mode,
               "sample_space": self.sample_space}
        if self.proportion_mode == "sampled":
            out.update(sample=self.sample, seed=self.seed)
        if self.feature_order is not None:
            out["feature_order"] = list(self.feature_order)
        return out


def _free(schema: FeatureSchema, X: Iterable[int]) -> list[int]:
    fixed = set(X)
    return [i for i in schema.explainable if i not in fixed]


def _completions(v: State, free: list[int], schema: FeatureSchema):
    base = list(v)
    for values in itertools.product(*(schema.domain(i) for i in free)):
        for i, val in zip(free, values):
            base[i] = val
        yield tuple(base)


def _sampled_points(kappa: BhxpClassifier, v: State, X: frozenset, cfg: PaxpConfig):
    schema = kappa.schema
    free = _free(schema, X)
    rng = substream(cfg.seed, "paxp", stable_digest(v), tuple(sorted(X)))
    if cfg.sample_space == "valid_states" and schema.space_size(free) <= cfg.max_points:
        # valid states are usually a thin slice of the product space, so draw
        # from the explicit list instead of rejecting
        pool = [x for x in _completions(v, free, schema) if kappa.model.is_valid(x)]
        if not pool:
            return []
        return [pool[int(i)] for i in rng.integers(len(pool), size=cfg.sample)]
    valid_only = cfg.sample_space == "valid_states"
    kept, draws = [], 0
    limit = cfg.sample * (100 if valid_only else 1)
    while len(kept) < cfg.sample and draws < limit:
        draws += 1
        x = list(v)
        for i in free:
            dom = schema.domain(i)
            x[i] = dom[int(rng.integers(len(dom)))]
        x = tuple(x)
        if valid_only and not kappa.model.is_valid(x):
            continue
        kept.append(x)
    return kept


def proportion(kappa: BhxpClassifier, v: State, X: Iterable[int], cfg: PaxpConfig) -> Fraction:
    """Fraction of points agreeing with ``v`` on ``X`` that ``kappa`` labels True."""
    X = frozenset(X)
    v = tuple(v)
    schema = kappa.schema
    if cfg.proportion_mode == "sampled":
        pts = _sampled_points(kappa, v, X, cfg)
        if not pts:
            raise EmptyMatchSet("no valid state matched the fixed features")
        return Fraction(sum(1 for x in pts if kappa(x)), len(pts))
    free = _free(schema, X)
    if schema.space_size(free) > cfg.max_points:
        raise SpaceTooLarge(f"{schema.space_size(free)} points exceed the cap {cfg.max_points}")
    valid_only = cfg.sample_space == "valid_states"
    total = hits = 0
    for x in _completions(v, free, schema):
        if valid_only and not kappa.model.is_valid(x):
            continue
        total += 1
        if kappa(x):
            hits += 1
    if total == 0:
        raise EmptyMatchSet("no valid state matched the fixed features")
    return Fraction(hits, total)


def is_weak_paxp(kappa: BhxpClassifier, v: State, X: Iterable[int], cfg: PaxpConfig) -> bool:
    X = frozenset(X)
    if cfg.proportion_mode == "exhaustive" and cfg.sample_space == "feature_space":
        # Same exact test as proportion() >= delta, stopping once the
        # misclassified count alone rules the subset out.
        schema = kappa.schema
        free = _free(schema, X)
        total = schema.space_size(free)
        if total > cfg.max_points:
            raise SpaceTooLarge(f"{total} points exceed the cap {cfg.max_points}")
        allowed_misses = (1 - cfg.delta) * total
        misses = 0
        for x in _completions(tuple(v), free, schema):
            if not kappa(x):
                misses += 1
                if misses > allowed_misses:
                    return False
        return True
    return proportion(kappa, v, X, cfg) >= cfg.delta


def find_lm_paxp(kappa: BhxpClassifier, v: State, cfg: PaxpConfig) -> frozenset:
    """Greedy drop from the full feature set in ``cfg``'s order.

    A feature is dropped whenever the remainder stays weak. Passes repeat
    until one drops nothing, so every single-feature removal from the result
    fails the weak test (a single pass suffices when the test is monotone).
    """
    v = tuple(v)
    if not kappa(v):
        raise ValueError("the anchor point must be classified True")
    order = cfg.order(kappa.schema)
    X = set(order)
    changed = True
    while changed:
        changed = False
        for j in order:
            if j in X and is_weak_paxp(kappa, v, X - {j}, cfg):
                X.discard(j)
                changed = True
    return frozenset(X)


def is_locally_minimal(kappa: BhxpClassifier, v: State, X: Iterable[int], cfg: PaxpConfig) -> bool:
    X = frozenset(X)
    return is_weak_paxp(kappa, v, X, cfg) and all(
        not is_weak_paxp(kappa, v, X - {j}, cfg) for j in X)


def enumerate_paxp(kappa: BhxpClassifier, v: State, cfg: PaxpConfig) -> set:
    """All subset-minimal weak explanations (exhaustive mode, small spaces only)."""
    if cfg.proportion_mode != "exhaustive":
        raise ValueError("enumeration requires exhaustive proportions")
    schema = kappa.schema
    size = schema.space_size()
    if size > cfg.enumeration_cap:
        raise SpaceTooLarge(f"feature space of {size} points exceeds the cap {cfg.enumeration_cap}")
    v = tuple(v)
    feats = schema.explainable
    found: list[frozenset] = []
    for r in range(len(feats) + 1):
        for combo in itertools.combinations(feats, r):
            X = frozenset(combo)
            # A weak set containing no smaller weak set is subset-minimal.
            if any(m <= X for m in found):
                continue
            if is_weak_paxp(kappa, v, X, cfg):
                found.append(X)
    return set(found)


def paxpred(kappa: BhxpClassifier, v: State, cfg: PaxpConfig, mode: str = "lm") -> Dnf:
    """Redefined predicate: one term per explanation, fixing its features to ``v``.

    ``mode="lm"`` uses a single locally-minimal explanation; ``mode="all"``
    disjoins every subset-minimal one.
    """
    v = tuple(v)
    schema = kappa.schema
    if mode == "lm":
        sets = [find_lm_paxp(kappa, v, cfg)]
    elif mode == "all":
        sets = sorted(enumerate_paxp(kappa, v, cfg), key=lambda s: (len(s), sorted(s)))
    else:
        raise ValueError(f"unknown paxpred mode {mode!r}")
    return Dnf(schema, [term_from_assignment(X, v) for X in sets])


def subset_names(schema: FeatureSchema, X: Iterable[int]) -> list[str]:
    return [schema.features[i].name for i in sorted(X)]
