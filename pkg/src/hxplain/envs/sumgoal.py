"""SumGoal: assign features one by one and aim for a large sum.

Features ``f1 .. f(n-1)`` take values in {0, 1}, ``fn`` in {0, 1, n}; the goal
is ``sum >= n + (n-1)/2``. The features are assigned left to right, one per
deterministic step. A hidden counter ``T`` records how many are assigned so
the dynamics stay Markovian while the explainable vocabulary is just
``f1 .. fn``.

Under the bundled threshold policy, fixing any (n-1)/2 of the first n-1
features to 1 already guarantees the goal one step before the end, which
makes the number of minimal explanations grow like a central binomial
coefficient.
"""

from __future__ import annotations

from ..core import Feature, FeatureSchema, Policy, State, TransitionModel, WeightedStates
from ..errors import IllegalAction
from ..predicate import Native

ENV_ID = "sumgoal"
NOOP = 3


class AllAssigned(IllegalAction):
    pass


def _check_n(n: int) -> None:
    if n < 3 or n % 2 == 0:
        raise ValueError("n must be odd and at least 3")


def goal_threshold(n: int) -> int:
    return n + (n - 1) // 2


class SumGoalModel(TransitionModel):
    env_id = ENV_ID

    def __init__(self, n: int):
        _check_n(n)
        self.n = n
        feats = [Feature(f"f{i}", (0, 1)) for i in range(1, n)]
        feats.append(Feature(f"f{n}", (0, 1, n)))
        feats.append(Feature("T", tuple(range(n + 1)), hidden=True))
        self.schema = FeatureSchema(feats)

    def make_state(self, values, assigned: int | None = None) -> State:
        values = tuple(values)
        if len(values) != self.n:
            raise ValueError(f"expected {self.n} values")
        t = self.n if assigned is None else assigned
        return values + (t,)

    def initial_state(self) -> State:
        return (0,) * self.n + (0,)

    def values_of(self, a: int) -> int:
        return self.n if a == 2 else a

    def is_terminal(self, s: State) -> bool:
        return s[-1] == self.n

    def actions(self, s: State) -> list[int]:
        t = s[-1]
        if t == self.n:
            return [NOOP]
        return [0, 1, 2] if t == self.n - 1 else [0, 1]

    def support(self, s: State, a: int) -> WeightedStates:
        t = s[-1]
        if t == self.n:
            if a == NOOP:
                return WeightedStates.point(s)
            raise AllAssigned("every feature is already assigned")
        if a not in self.actions(s):
            raise IllegalAction(f"action {a} is not available for f{t + 1}")
        out = list(s)
        out[t] = self.values_of(a)
        out[-1] = t + 1
        return WeightedStates.point(tuple(out))

    def branching_bound(self) -> int:
        return 1

    def is_valid(self, s: State) -> bool:
        t = s[-1]
        return all(v == 0 for v in s[t:self.n])

    def action_name(self, a: int) -> str:
        return "noop" if a == NOOP else f"assign {self.values_of(a)}"

    def config(self) -> dict:
        return {"n": self.n}


def sumgoal_support(model: SumGoalModel, s: State, a: int) -> WeightedStates:
    return model.support(s, a)


def sumgoal_predicate(n: int) -> Native:
    _check_n(n)
    target = goal_threshold(n)
    model = SumGoalModel(n)
    return Native(ENV_ID, "goal", lambda s: sum(s[:n]) >= target, {"n": n}, model.schema)


class ThresholdPolicy(Policy):
    """Assign 1 to the first n-1 features; give fn the value n when enough ones are in place."""

    def __init__(self, n: int):
        _check_n(n)
        self.n = n
        super().__init__(meta={"type": "heuristic", "n": n})

    def act(self, s: State) -> int:
        t = s[-1]
        if t == self.n:
            return NOOP
        if t < self.n - 1:
            return 1
        return 2 if sum(s[:self.n - 1]) >= (self.n - 1) // 2 else 0

    def to_json(self) -> dict:
        return {"type": "heuristic", "env": ENV_ID, "n": self.n, "meta": self.meta}


def sumgoal_policy(n: int) -> ThresholdPolicy:
    return ThresholdPolicy(n)


def near_goal_state(n: int) -> State:
    """``(1, ..., 1, 0)`` with only fn left to assign."""
    return (1,) * (n - 1) + (0, n - 1)
