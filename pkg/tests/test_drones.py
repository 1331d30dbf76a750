import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hxplain.envs import drones as dc
from hxplain.errors import UnknownPredicate

WORLD = dc.bundled_world()


@pytest.fixture(scope="module")
def model():
    return dc.DroneCoverageModel(WORLD)


def test_bundled_world_round_trip():
    assert dc.DcWorld.from_json(WORLD.to_json()) == WORLD
    with pytest.raises(ValueError):
        dc.DcWorld(frozenset(), ((0, 0),) * 4)
    with pytest.raises(ValueError):
        dc.DcWorld(frozenset({(0, 0)}), ((0, 0), (1, 1), (2, 2), (3, 3)))


def test_schema_shape():
    s = dc.SCHEMA
    assert len(s.names) == 31
    assert len(s.explainable) == 27
    assert [s.names[i] for i in range(31) if i not in s.explainable] == ["D1", "D2", "D3", "CRASHED"]
    assert s.names[0] == "V-2-2" and s.names[12] == "V+0+0"


def test_wind_outcomes():
    assert dc.wind_outcomes(dc.STOP) == ((None, 1),)
    right = dict(dc.wind_outcomes(dc.RIGHT))
    assert right[None] == Fraction(1, 10) and right[dc.RIGHT] == Fraction(2, 5)
    assert sum(p for _, p in dc.wind_outcomes(dc.UP)) == 1


def test_support_masses_and_stop(model):
    s = model.initial_state()
    for a in (dc.UP, dc.DOWN, dc.LEFT, dc.RIGHT):
        out = model.support(s, a)
        assert out.mass() == 1 and 1 <= len(out) <= 4
    stop = model.support(s, dc.STOP)
    assert len(stop) == 1 and stop.mass() == 1


def test_left_edge_wind_collapses():
    world = dc.DcWorld(frozenset({(9, 9)}), ((0, 5), (5, 0), (9, 5), (5, 9)))
    model = dc.DroneCoverageModel(world)
    out = model.support(model.initial_state(), dc.UP)
    # left wind at x = 0 and the opposing down wind both leave it at the mid cell
    xs = {(t[dc.X_IDX], t[dc.Y_IDX]): p for t, p in out.items()}
    assert xs[(0, 4)] == Fraction(1, 10) + Fraction(1, 5)
    assert len(xs) == 3


def test_greedy_matches_golden(golden):
    g = golden["dc_overlap_right"]
    trees = frozenset(tuple(t) for t in g["trees"])
    joint = tuple(tuple(d) for d in g["drones"])
    assert dc.ACTION_NAMES[dc.greedy_action(joint, 0, trees)] == g["best"] == "left"


def test_greedy_avoids_tree_above():
    trees = frozenset({(4, 3)})
    joint = ((4, 5), (0, 0), (9, 0), (0, 9))
    assert dc.greedy_action(joint, 0, trees) != dc.UP


def test_crashed_ego_absorbs(model):
    joint = WORLD.drones
    s = model.make_state(joint, crashed=True)
    assert model.is_terminal(s)
    assert model.actions(s) == [dc.STOP]
    assert model.support(s, dc.STOP).as_dict() == {s: 1}
    with pytest.raises(dc.CrashedAgent):
        model.support(s, dc.UP)


def test_moving_into_tree_crashes():
    world = dc.DcWorld(frozenset({(5, 4)}), ((5, 5), (0, 0), (9, 0), (0, 9)))
    model = dc.DroneCoverageModel(world)
    out = model.support(model.initial_state(), dc.UP)
    assert all(t[dc.CRASHED_IDX] for t in out)


def test_same_cell_crash():
    finals, crashed = dc.resolve(((1, 1), (3, 1), None, (9, 9)),
                                 ((dc.RIGHT, None), (dc.LEFT, None), (dc.STOP, None), (dc.STOP, None)),
                                 frozenset())
    assert crashed == (True, True, False, False)
    _, swapped = dc.resolve(((1, 1), (2, 1), None, (9, 9)),
                            ((dc.RIGHT, None), (dc.LEFT, None), (dc.STOP, None), (dc.STOP, None)),
                            frozenset())
    assert swapped[:2] == (True, True)


def brute_cover(pos, others, trees):
    n = 0
    for x, y in itertools.product(range(pos[0] - 1, pos[0] + 2), range(pos[1] - 1, pos[1] + 2)):
        if 0 <= x < 10 and 0 <= y < 10 and (x, y) not in trees:
            if all(max(abs(x - o[0]), abs(y - o[1])) > 1 for o in others if o is not None):
                n += 1
    return n


cells = st.tuples(st.integers(0, 9), st.integers(0, 9))


@settings(max_examples=100)
@given(cells, st.lists(cells, max_size=3))
def test_cover_score_recount(pos, others):
    assert dc.cover_score(pos, others, WORLD.trees) == brute_cover(pos, others, WORLD.trees)


@settings(max_examples=40, deadline=None)
@given(st.lists(cells, min_size=4, max_size=4, unique=True), st.sampled_from(range(5)))
def test_states_valid_and_distribution(joint, a):
    trees = frozenset({(9, 9), (0, 0)}) - set(joint)
    world = dc.DcWorld(trees, tuple(joint))
    model = dc.DroneCoverageModel(world)
    s = model.initial_state()
    assert model.is_valid(s)
    out = model.support(s, a)
    assert out.mass() == 1
    for t in out:
        assert model.is_valid(t)


def test_global_predicates_are_conjunctions(model):
    s = model.initial_state()
    joint = model.positions(s)
    perfect = dc.dc_predicate(model, "perfect_cover", "global")
    want = all(dc._drone_perfect(joint, i, WORLD.trees, False) for i in range(4))
    assert perfect(s) == want
    spread = ((1, 1), (8, 1), (1, 8), (8, 8))
    world = dc.DcWorld(frozenset(), spread)
    m2 = dc.DroneCoverageModel(world)
    s2 = m2.initial_state()
    assert dc.dc_predicate(m2, "perfect_cover", "global")(s2)
    assert dc.dc_predicate(m2, "max_reward", "global")(s2)
    assert dc.dc_predicate(m2, "region", "global")(s2)
    assert dc.dc_predicate(m2, "no_drones", "global")(s2)
    assert dc.dc_predicate(m2, "crash", "global")(s2)
    assert not dc.dc_predicate(m2, "crash", "global")(m2.make_state(spread, crashed=True))


def test_local_predicates(model):
    world = dc.DcWorld(frozenset(), ((1, 1), (8, 1), (1, 8), (8, 8)))
    m2 = dc.DroneCoverageModel(world)
    s = m2.initial_state()
    assert dc.dc_predicate(m2, "perfect_cover")(s)
    assert dc.dc_predicate(m2, "no_drones")(s)
    assert dc.dc_predicate(m2, "region")(s)
    assert not dc.dc_predicate(m2, "region", params={"quadrant": 3})(s)
    edge = dc.DroneCoverageModel(dc.DcWorld(frozenset(), ((0, 4), (8, 1), (1, 8), (8, 8))))
    assert not dc.dc_predicate(edge, "max_reward")(edge.initial_state())
    assert dc.dc_predicate(edge, "perfect_cover")(edge.initial_state())
    with pytest.raises(UnknownPredicate):
        dc.dc_predicate(m2, "fly")
    with pytest.raises(UnknownPredicate):
        dc.dc_predicate(m2, "crash", "everywhere")


def test_joint_wind_branching():
    model = dc.DroneCoverageModel(WORLD, "joint")
    assert model.branching_bound() == 256
    out = model.support(model.initial_state(), dc.STOP)
    assert out.mass() == 1
    with pytest.raises(ValueError):
        dc.DroneCoverageModel(WORLD, "storm")


def test_policy_round_trip(model):
    pol = dc.dc_greedy_policy(WORLD)
    doc = pol.to_json()
    assert doc["type"] == "heuristic" and dc.DcWorld.from_json(doc["world"]) == WORLD
    assert pol(model.initial_state()) in range(5)
