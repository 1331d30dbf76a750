import json
import random
from fractions import Fraction
from pathlib import Path

import pytest

from hxplain.core import TabularModel, TabularPolicy, WeightedStates
from hxplain.envs import frozenlake as fl
from hxplain.predicate import Dnf, Literal, Term

GOLDEN = json.loads((Path(__file__).parent / "golden" / "derived.json").read_text())


@pytest.fixture(scope="session")
def golden():
    return GOLDEN


@pytest.fixture(scope="session")
def fl4():
    return fl.FrozenLakeModel(fl.bundled_map("4x4"))


@pytest.fixture(scope="session")
def fl4_scripted(fl4):
    """The hand-written 4x4 policy recorded in the golden file."""
    table = {tuple(c): a for c, a in GOLDEN["fl4_policy"]}
    q = {c: [1.0 if a == table[c] else 0.0 for a in range(4)] for c in table}
    return fl.QTablePolicy(fl4.map, q)


@pytest.fixture(scope="session")
def fl4_trained():
    return fl.fl_train_q(fl.bundled_map("4x4"), 20_000, seed=1)


def toy_chain_model():
    table = {}
    for s in range(8):
        if s == 3:
            step = [(3, Fraction(1, 2)), (4, Fraction(1, 2))]
        elif s in (6, 7):
            step = [(s, Fraction(1))]
        else:
            step = [(s + 1, Fraction(1))]
        table[s] = {0: step}
        if s in (2, 5):
            table[s][1] = [(7, Fraction(1))]
        elif s < 6:
            table[s][1] = list(step)
    model = TabularModel(8, table)
    policy = TabularPolicy({(s,): 0 for s in range(8)})
    return model, policy


def goal(model, *ids):
    return Dnf(model.schema, [Term([Literal(0, g)]) for g in ids])


def one_step_model(branches):
    """State 0 with one action per entry of ``branches`` (lists of (target, p)); targets absorb."""
    n = 1 + max(t for out in branches for t, _ in out)
    table = {0: {a: out for a, out in enumerate(branches)}}
    for s in range(1, n):
        table[s] = {0: [(s, Fraction(1))]}
    model = TabularModel(n, table)
    return model, TabularPolicy({(s,): 0 for s in range(n)})


def random_frontier(rng: random.Random, states):
    picks = rng.sample(states, min(len(states), rng.randint(1, 4)))
    weights = [rng.randint(1, 5) for _ in picks]
    total = sum(weights)
    return WeightedStates((s, Fraction(w, total)) for s, w in zip(picks, weights))


# Every importance score computed in-process during the session is recorded
# so the range check covers the whole suite, not only the acceptance module.
SCORES: list = []
ACCEPTANCE: dict = {}


def _recording(fn):
    def wrapper(*args, **kwargs):
        det = fn(*args, **kwargs)
        SCORES.append(det.score)
        return det
    wrapper.__wrapped__ = fn
    return wrapper


def pytest_configure(config):
    from hxplain import bhxp, fhxp, scoring
    if not hasattr(scoring.importance_detail, "__wrapped__"):
        wrapped = _recording(scoring.importance_detail)
        for mod in (scoring, bhxp, fhxp):
            mod.importance_detail = wrapped


def scores_out_of_range():
    return [s for s in SCORES if not -1 <= s <= 1]


def pytest_sessionfinish(session, exitstatus):
    if scores_out_of_range():
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
    bad = scores_out_of_range()
    terminalreporter.write_line(
        f"importance scores computed this session: {len(SCORES)}, outside [-1, 1]: {len(bad)}")
