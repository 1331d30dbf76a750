"""Backward explanation of a history by successive predicate redefinition.

Working from the end of the history, each window of at most ``l`` actions
yields its most important action for the current predicate. The state from
which that action was taken becomes the anchor of a utility classifier, and
an abductive explanation of that classifier becomes the predicate studied in
the preceding window.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from .core import Dynamics, History, Policy, TransitionModel
from .errors import EmptyHistory
from .paxp import BhxpClassifier, PaxpConfig, paxpred
from .predicate import Predicate
from .scoring import EXHAUSTIVE, ScoringBudget, importance_detail

REACHED_START = "reached_start"
ZERO_UTILITY = "zero_utility"


@dataclass(frozen=True)
class BhxpConfig:
    l: int = 4
    delta: Fraction = Fraction(1)
    paxp: PaxpConfig = field(default_factory=PaxpConfig)
    budget: ScoringBudget = EXHAUSTIVE
    paxpred_mode: str = "lm"

    def __post_init__(self):
        object.__setattr__(self, "delta", Fraction(self.delta))
        if self.l < 1:
            raise ValueError("l must be >= 1")
        if not 0 <= self.delta <= 1:
            raise ValueError("delta must lie in [0, 1]")
        if self.paxp.delta != self.delta:
            object.__setattr__(self, "paxp", _with_delta(self.paxp, self.delta))

    def to_json(self) -> dict:
        return {"l": self.l, "delta": str(self.delta), "paxp": self.paxp.to_json(),
                "budget": self.budget.to_json(), "paxpred_mode": self.paxpred_mode}


def _with_delta(cfg: PaxpConfig, delta: Fraction) -> PaxpConfig:
    from dataclasses import replace
    return replace(cfg, delta=delta)


@dataclass
class Step:
    window: tuple[int, int]
    index: int
    action: int
    score: Fraction
    anchor_utility: Fraction
    predicate_studied: Predicate
    predicate_next: Predicate | None
    window_scores: dict = field(default_factory=dict)


@dataclass
class Explanation:
    steps: list[Step]
    termination_reason: str
    deviations: list[str] = field(default_factory=list)

    @property
    def actions(self) -> list[int]:
        return [st.action for st in self.steps]

    @property
    def predicates(self) -> list[Predicate]:
        return [st.predicate_next for st in self.steps]

    @property
    def indices(self) -> list[int]:
        return [st.index for st in self.steps]


def window_argmax(model: TransitionModel, policy: Policy, H: History, i_min: int, i_max: int,
                  d: Predicate, l: int, budget: ScoringBudget = EXHAUSTIVE,
                  dynamics: Dynamics | None = None):
    """Most important action among indices ``i_min .. i_max - 1``.

    Returns ``(i, s_i, a_i, score, scores, single_action)``; ties go to the
    smallest index.
    """
    if not 0 <= i_min < i_max <= H.k:
        raise ValueError(f"invalid window [{i_min}, {i_max}] for a history of {H.k} actions")
    dyn = dynamics or Dynamics(model, policy)
    best = None
    scores = {}
    single = False
    for i in range(i_min, i_max):
        det = importance_detail(model, policy, H.states[i], H.actions[i], d, l, budget, dyn)
        scores[i] = det.score
        single |= det.single_action
        if best is None or det.score > scores[best]:
            best = i
    return best, H.states[best], H.actions[best], scores[best], scores, single


def explain_backward(model: TransitionModel, policy: Policy, H: History, d: Predicate,
                     cfg: BhxpConfig = BhxpConfig(),
                     dynamics: Dynamics | None = None) -> Explanation:
    if H.k == 0:
        raise EmptyHistory("nothing to explain")
    if not d(H.states[-1]):
        warnings.warn("the predicate does not hold in the final state of the history",
                      stacklevel=2)
    dyn = dynamics or Dynamics(model, policy, max_frontier=None)
    deviations = []
    i_max = H.k
    i_min = max(0, i_max - cfg.l)
    if i_min == 0:
        # The literal loop guard would skip this history entirely.
        deviations.append("first_window_always_processed")
    steps: list[Step] = []
    while True:
        i, s, a, score, scores, single = window_argmax(
            model, policy, H, i_min, i_max, d, cfg.l, cfg.budget, dyn)
        if single and "forced_move_scored_as_own_utility" not in deviations:
            deviations.append("forced_move_scored_as_own_utility")
        kappa = BhxpClassifier(s, model, policy, d, cfg.l, dyn)
        u = kappa.threshold
        d_next = paxpred(kappa, s, cfg.paxp, cfg.paxpred_mode)
        steps.append(Step((i_min, i_max), i, a, score, u, d, d_next, scores))
        if u == 0:
            return Explanation(steps, ZERO_UTILITY, deviations)
        if i_min == 0:
            return Explanation(steps, REACHED_START, deviations)
        d = d_next
        i_max = i
        i_min = max(0, i_max - cfg.l)
