from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hxplain.core import support
from hxplain.envs import frozenlake as fl
from hxplain.errors import IllegalAction, TerminalState, UnknownPredicate


def test_transitions_match_golden(fl4, golden):
    for cell, a, want in golden["fl4_transitions"]:
        got = fl4.support(fl4.make_state(tuple(cell)), a)
        assert sorted([list(s[0]), str(p)] for s, p in got.items()) == want


def test_corner_merges_wall_bumps(fl4):
    out = fl4.support(fl4.make_state((0, 0)), fl.LEFT)
    masses = {s[0]: p for s, p in out.items()}
    assert masses == {(0, 0): Fraction(4, 5), (1, 0): Fraction(1, 5)}
    assert all(s[1] == (0, 0) for s in out)


def test_state_features(fl4):
    s = fl4.make_state((2, 2), (1, 2))
    P, PP, HP, PD, HN = s
    assert PD == 4 and HN == len(fl4.map.holes) and HP in fl4.map.holes
    assert fl4.is_valid(s)
    assert not fl4.is_valid((P, PP, HP, PD + 1, HN))
    assert not fl4.is_valid(fl4.make_state((2, 2), (0, 0)))


def test_terminal_states(fl4):
    hole = next(iter(fl4.map.holes))
    s = fl4.make_state(hole)
    assert fl4.is_terminal(s)
    assert fl4.actions(s) == [fl.NOOP]
    assert support(fl4, s, fl.NOOP).as_dict() == {s: 1}
    with pytest.raises(TerminalState):
        fl4.support(s, fl.LEFT)
    with pytest.raises(IllegalAction):
        fl4.support(fl4.initial_state(), 9)


def test_predicates(fl4):
    win = fl.fl_predicate(fl4, "win")
    holes = fl.fl_predicate(fl4, "holes")
    assert win(fl4.make_state(fl4.map.goal)) and not win(fl4.initial_state())
    assert holes(fl4.make_state(next(iter(fl4.map.holes))))
    region = fl.fl_predicate(fl4, "region", {"cells": [[0, 1], [0, 2]]})
    assert region(fl4.make_state((0, 2))) and not region(fl4.make_state((0, 0)))
    with pytest.raises(ValueError):
        fl.fl_predicate(fl4, "region", {})
    with pytest.raises(UnknownPredicate):
        fl.fl_predicate(fl4, "lose")


def test_map_validation_and_round_trip():
    m = fl.bundled_map("8x8")
    assert (m.width, m.height) == (8, 8)
    assert fl.FlMap.from_json(m.to_json()) == m
    with pytest.raises(ValueError):
        fl.FlMap(4, 4, frozenset({(1, 1)}), (0, 0), (0, 0))
    with pytest.raises(ValueError):
        fl.FlMap(4, 4, frozenset(), (0, 0), (3, 3))
    with pytest.raises(ValueError):
        fl.FlMap(4, 4, frozenset({(9, 9)}), (0, 0), (3, 3))


def test_training_is_deterministic():
    m = fl.bundled_map("4x4")
    a = fl.fl_train_q(m, 2000, seed=3)
    b = fl.fl_train_q(m, 2000, seed=3)
    assert a.q == b.q
    assert fl.fl_train_q(m, 2000, seed=4).q != a.q


def test_untrained_table_plays_first_action():
    m = fl.bundled_map("4x4")
    pol = fl.fl_train_q(m, 0, seed=0)
    model = fl.FrozenLakeModel(m)
    assert pol(model.initial_state()) == fl.LEFT
    assert pol(model.make_state(m.goal)) == fl.NOOP


def test_trained_policy_solves_small_map(fl4, fl4_trained):
    assert fl.success_rate(fl4, fl4_trained, 500, seed=2) > 0.5


def test_policy_round_trip(fl4_trained):
    again = fl.QTablePolicy.from_json(fl4_trained.to_json())
    assert again.q == fl4_trained.q and again.map == fl4_trained.map


@given(st.sampled_from(fl.bundled_map("8x8").cells), st.sampled_from([0, 1, 2, 3]))
def test_support_is_a_distribution(cell, a):
    model = fl.FrozenLakeModel(fl.bundled_map("8x8"))
    s = model.make_state(cell)
    if model.is_terminal(s):
        return
    out = model.support(s, a)
    assert out.mass() == 1
    assert 1 <= len(out) <= 3
    for t in out:
        assert fl.manhattan(t[0], cell) <= 1 and t[1] == cell
