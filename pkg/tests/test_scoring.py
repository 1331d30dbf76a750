import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hxplain.core import Dynamics, WeightedStates, deterministic_chain, constant_policy
from hxplain.envs import frozenlake as fl
from hxplain.errors import IllegalAction
from hxplain.oracle import oracle_importance, random_tabular_instance
from hxplain.scoring import (
    EXHAUSTIVE,
    ScoringBudget,
    branch_utility,
    importance,
    importance_detail,
    scenario_count,
    score_json,
    state_utility,
    utility,
)

from conftest import goal, one_step_model


def test_utility_basics():
    model, _ = one_step_model([[(1, Fraction(1))]])
    d = goal(model, 1)
    assert utility(WeightedStates(), d) == 0
    S = WeightedStates({(1,): Fraction(3, 5), (0,): Fraction(2, 5)})
    assert utility(S, d) == Fraction(3, 5)


def test_state_utility_trivial_cases():
    chain = deterministic_chain(4)
    pol = constant_policy(0)
    assert state_utility(chain, pol, (2,), goal(chain, 2), 0) == 1
    assert state_utility(chain, pol, (3,), goal(chain, 1), 5) == 0


def test_state_utility_fl4_matches_golden(fl4, fl4_scripted, golden):
    win = fl.fl_predicate(fl4, "win")
    for cell, want in golden["fl4_win_utility_k3"]:
        s = fl4.make_state(tuple(cell))
        assert state_utility(fl4, fl4_scripted, s, win, 3) == Fraction(want)


def test_forced_one_step_scores():
    model, pol = one_step_model([[(1, Fraction(1))], [(2, Fraction(1))], [(3, Fraction(1))]])
    assert importance(model, pol, (0,), 0, goal(model, 1), 0) == 1


def test_worked_example_one_tenth():
    model, pol = one_step_model([[(1, Fraction(3, 5)), (2, Fraction(2, 5))], [(1, Fraction(1))],
                                 [(2, Fraction(1))]])
    assert importance(model, pol, (0,), 0, goal(model, 1), 0) == Fraction(1, 10)


def test_single_action_scores_own_utility():
    chain = deterministic_chain(3)
    det = importance_detail(chain, constant_policy(0), (0,), 0, goal(chain, 1), 0)
    assert det.single_action and det.score == 1


def test_illegal_action_and_negative_horizon():
    chain = deterministic_chain(3)
    with pytest.raises(IllegalAction):
        importance(chain, constant_policy(0), (0,), 4, goal(chain, 1), 0)
    with pytest.raises(ValueError):
        importance(chain, constant_policy(0), (0,), 0, goal(chain, 1), -1)


def test_score_json():
    assert score_json(Fraction(57, 500)) == {"exact": "57/500", "decimal": 0.114}


def test_budget_validation():
    with pytest.raises(ValueError):
        ScoringBudget("max_scenarios", 0)
    with pytest.raises(ValueError):
        ScoringBudget("sometimes")


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 100_000), k=st.integers(0, 4))
def test_matches_oracle(seed, k):
    rng = random.Random(seed)
    model, pol, d = random_tabular_instance(rng)
    s = (rng.randrange(model.n_states),)
    for a in model.actions(s):
        assert importance(model, pol, s, a, d, k) == oracle_importance(model, pol, s, a, d, k)


@settings(max_examples=40, deadline=None)
@given(p=st.fractions(0, 1), q=st.fractions(0, 1), bump=st.fractions(0, 1))
def test_antitone_in_alternatives(p, q, bump):
    q2 = min(Fraction(1), q + bump)

    def score(alt):
        branches = [[(1, p), (2, 1 - p)], [(1, alt), (2, 1 - alt)]]
        branches = [[(t, w) for t, w in b if w > 0] for b in branches]
        model, pol = one_step_model(branches)
        return importance(model, pol, (0,), 0, goal(model, 1), 0)

    assert score(q2) <= score(q)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 100_000), k=st.integers(0, 3), extra=st.integers(0, 5))
def test_budget_at_count_equals_exhaustive(seed, k, extra):
    rng = random.Random(seed)
    model, pol, d = random_tabular_instance(rng)
    s = (rng.randrange(model.n_states),)
    dyn = Dynamics(model, pol)
    for a in model.actions(s):
        n = scenario_count(dyn, s, a, k) + extra
        assert branch_utility(dyn, s, a, d, k, ScoringBudget.max_scenarios(n, 3)) == \
            branch_utility(dyn, s, a, d, k, EXHAUSTIVE)


def test_sampled_budget_reproducible_and_thread_independent(fl4, fl4_scripted, monkeypatch):
    win = fl.fl_predicate(fl4, "win")
    s = fl4.make_state((2, 2))
    budget = ScoringBudget.max_scenarios(5, seed=11)
    runs = []
    for threads in ("1", "4", "1"):
        monkeypatch.setenv("HXPLAIN_THREADS", threads)
        runs.append(importance(fl4, fl4_scripted, s, 1, win, 3, budget))
    assert runs[0] == runs[1] == runs[2]
    assert (runs[0] * 15).denominator == 1
