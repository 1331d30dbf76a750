"""Forward explanation: one importance score per action of the history."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import Dynamics, History, Policy, TransitionModel
from .errors import EmptyHistory
from .predicate import Predicate
from .scoring import EXHAUSTIVE, ScoringBudget, importance_detail


@dataclass
class ForwardExplanation:
    scores: list[Fraction]
    actions: list[int]
    budget: ScoringBudget
    horizon: int | None = None
    deviations: list[str] = field(default_factory=list)
    offset: int = 0

    @property
    def indices(self) -> list[int]:
        return list(range(self.offset, self.offset + len(self.scores)))

    @property
    def top_k(self) -> list[int]:
        """History indices ranked by decreasing score, ties to the smaller index."""
        order = sorted(range(len(self.scores)), key=lambda i: (-self.scores[i], i))
        return [self.offset + i for i in order]

    @property
    def horizon_convention(self) -> str:
        return "remaining" if self.horizon is None else "fixed"


def explain_forward(model: TransitionModel, policy: Policy, H: History, d: Predicate,
                    budget: ScoringBudget = EXHAUSTIVE, horizon: int | None = None,
                    start: int = 0, stop: int | None = None,
                    dynamics: Dynamics | None = None) -> ForwardExplanation:
    """Score actions ``start .. stop - 1`` of ``H``.

    By default action ``i`` is scored at the remaining horizon ``k - i - 1``,
    i.e. for ``d`` holding at the end of the history. A fixed ``horizon``
    scores every action with the same lookahead instead.
    """
    if H.k < 1:
        raise EmptyHistory("nothing to explain")
    stop = H.k if stop is None else stop
    dyn = dynamics or Dynamics(model, policy)
    scores, deviations = [], []
    for i in range(start, stop):
        k_i = H.k - i - 1 if horizon is None else horizon
        det = importance_detail(model, policy, H.states[i], H.actions[i], d, k_i, budget, dyn)
        if det.single_action and "forced_move_scored_as_own_utility" not in deviations:
            deviations.append("forced_move_scored_as_own_utility")
        scores.append(det.score)
    return ForwardExplanation(scores, list(H.actions[start:stop]), budget, horizon, deviations, start)
