import random
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as hst

from conftest import goal, toy_chain_model
from hxplain.bhxp import REACHED_START, ZERO_UTILITY, BhxpConfig, explain_backward, window_argmax
from hxplain.core import History, TabularModel, TabularPolicy
from hxplain.errors import EmptyHistory
from hxplain.fhxp import explain_forward
from hxplain.oracle import oracle_importance, oracle_state_utility, random_tabular_instance
from hxplain.predicate import Dnf, Literal, Term


def chain_history(model, n=7):
    return History(model.schema, [(i,) for i in range(n)], [0] * (n - 1), model.env_id)


def test_toy_chain_matches_golden(golden):
    model, policy = toy_chain_model()
    H = chain_history(model)
    E = explain_backward(model, policy, H, goal(model, 6), BhxpConfig(l=3))
    want = golden["toy_chain_backward"]
    assert E.indices == [s["index"] for s in want["steps"]] == [5, 2, 0]
    assert [str(st.score) for st in E.steps] == [s["score"] for s in want["steps"]]
    assert [str(st.anchor_utility) for st in E.steps] == [s["anchor_utility"] for s in want["steps"]]
    assert E.termination_reason == want["termination_reason"] == ZERO_UTILITY
    for st, w in zip(E.steps, want["steps"]):
        fixed = sorted({lit.feature for t in st.predicate_next.terms for lit in t.literals})
        assert fixed == w["next_fixes"]
    # each step studies the predicate produced by the step after it
    assert E.steps[1].predicate_studied == E.steps[0].predicate_next
    assert E.steps[1].predicate_studied == goal(model, 5)
    assert "first_window_always_processed" not in E.deviations


def test_windows_shrink_to_chosen_index():
    model, policy = toy_chain_model()
    E = explain_backward(model, policy, chain_history(model), goal(model, 6), BhxpConfig(l=3))
    assert [st.window for st in E.steps] == [(3, 6), (2, 5), (0, 2)]


def test_single_action_history():
    model, policy = toy_chain_model()
    H = History(model.schema, [(5,), (6,)], [0], model.env_id)
    E = explain_backward(model, policy, H, goal(model, 6), BhxpConfig(l=4))
    assert E.indices == [0]
    assert E.steps[0].score == 1
    assert E.termination_reason == REACHED_START
    assert E.deviations == ["first_window_always_processed"]


def test_window_ties_go_to_smallest_index():
    # states 0..3 in a line, every alternative equal to the chosen move
    table = {s: {0: [(s + 1, Fraction(1))], 1: [(s + 1, Fraction(1))]} for s in range(3)}
    table[3] = {0: [(3, Fraction(1))]}
    model = TabularModel(4, table)
    policy = TabularPolicy({(s,): 0 for s in range(4)})
    H = History(model.schema, [(0,), (1,), (2,), (3,)], [0, 0, 0], model.env_id)
    i, s, a, score, scores, _ = window_argmax(model, policy, H, 0, 3, goal(model, 3), 3)
    assert i == 0 and score == 0 and set(scores) == {0, 1, 2}
    with pytest.raises(ValueError):
        window_argmax(model, policy, H, 2, 2, goal(model, 3), 3)


def test_warns_when_predicate_false_at_end():
    model, policy = toy_chain_model()
    H = chain_history(model)
    with pytest.warns(UserWarning):
        explain_backward(model, policy, H, goal(model, 7), BhxpConfig(l=3))


def test_config_validation():
    with pytest.raises(ValueError):
        BhxpConfig(l=0)
    with pytest.raises(ValueError):
        BhxpConfig(delta=Fraction(3, 2))
    assert BhxpConfig(delta=Fraction(1, 2)).paxp.delta == Fraction(1, 2)


def test_empty_history_rejected():
    model, _ = toy_chain_model()
    with pytest.raises(EmptyHistory):
        History(model.schema, [(0,)], [], model.env_id)


def test_first_step_equals_forward_top_action():
    model, policy = toy_chain_model()
    H = chain_history(model)
    E = explain_backward(model, policy, H, goal(model, 6), BhxpConfig(l=3))
    F = explain_forward(model, policy, H, goal(model, 6), horizon=3, start=max(0, H.k - 3))
    assert E.steps[0].index == F.top_k[0]
    assert E.steps[0].score == max(F.scores)


def reference_backward(model, policy, H, d, l):
    """Backward loop rebuilt from the oracles for one-feature models."""
    out = []
    i_max = H.k
    while True:
        i_min = max(0, i_max - l)
        scores = {i: oracle_importance(model, policy, H.states[i], H.actions[i], d, l)
                  for i in range(i_min, i_max)}
        best = min(scores, key=lambda i: (-scores[i], i))
        s = H.states[best]
        u = oracle_state_utility(model, policy, s, d, l)
        out.append((best, scores[best], u))
        if u == 0 or i_min == 0:
            return out, ZERO_UTILITY if u == 0 else REACHED_START
        # with one feature the only other candidate is "state is s"
        all_ok = all(oracle_state_utility(model, policy, (x,), d, l) >= u
                     for x in range(len(model.schema.domain(0))))
        d = Dnf(model.schema, [Term()]) if all_ok else Dnf(model.schema, [Term([Literal(0, s[0])])])
        i_max = best


@settings(max_examples=40, deadline=None)
@given(seed=hst.integers(0, 10 ** 6), l=hst.integers(1, 3), k=hst.integers(1, 7))
def test_random_instances_match_reference(seed, l, k):
    rng = random.Random(seed)
    model, policy, d = random_tabular_instance(rng, max_states=8)
    s = (rng.randrange(len(model.schema.domain(0))),)
    states, actions = [s], []
    for _ in range(k):
        a = policy(s)
        outs = model.support(s, a)
        s = rng.choice(sorted(outs))
        states.append(s)
        actions.append(a)
    H = History(model.schema, states, actions, model.env_id)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        E = explain_backward(model, policy, H, d, BhxpConfig(l=l))
    want, reason = reference_backward(model, policy, H, d, l)
    assert [(st.index, st.score, st.anchor_utility) for st in E.steps] == want
    assert E.termination_reason == reason
    idx = E.indices
    assert all(a > b for a, b in zip(idx, idx[1:]))
    for st in E.steps:
        assert -1 <= st.score <= 1
        assert st.window[0] <= st.index < st.window[1] <= H.k
