import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hxplain.envs import connect4 as c4
from hxplain.errors import IllegalAction, MissingReference, TerminalState, UnknownPredicate

E, A, O = c4.EMPTY, c4.AGENT, c4.OPP


def board(*rows):
    """Bottom rows only, padded with empty rows on top."""
    rows = ["......."] * (6 - len(rows)) + list(rows)
    return c4.board_from_rows(rows)


def test_empty_board_reply_is_uniform():
    model = c4.Connect4Model()
    out = model.support(c4.EMPTY_BOARD, 3)
    assert len(out) == 7
    assert set(out.as_dict().values()) == {Fraction(1, 7)}
    assert all(b.count(A) == 1 and b.count(O) == 1 for b in out)


def test_two_legal_replies():
    b = c4.board_from_rows(["...OAAO", "O.AAOOA", "AAOOAAO", "OOAAOOA", "AAOOAAO", "OOAAOOA"])
    model = c4.Connect4Model()
    assert model.is_valid(b) and c4.legal_columns(b) == [0, 1, 2]
    out = model.support(b, 2)
    assert sorted(out.as_dict().values()) == [Fraction(1, 2), Fraction(1, 2)]


def test_agent_win_has_no_reply():
    b = board("AAA.OOO")
    out = c4.Connect4Model().support(b, 3)
    (nb, p), = out.items()
    assert p == 1 and c4.status(nb)[0]


def test_errors():
    model = c4.Connect4Model()
    full = board(*(["A......"] * 6))
    with pytest.raises(IllegalAction):
        model.support(full, 0)
    won = board("AAAAOOO")
    with pytest.raises(TerminalState):
        model.support(won, 1)
    assert model.actions(won) == [c4.NOOP]


def test_heuristic_policy_priorities():
    pol = c4.C4HeuristicPolicy()
    assert pol(board("AAA.OO.")) == 3          # win
    assert pol(board("OOO..A.")) == 3          # block
    assert pol(c4.EMPTY_BOARD) == 3            # centre
    assert pol(board("AAAAOOO")) == c4.NOOP


def test_heuristic_opponent_blocks():
    opp = c4.OpponentModel("heuristic")
    b = board("AAA..OO")
    assert opp.distribution(b) == [(3, Fraction(1))]
    dist = dict(opp.distribution(c4.EMPTY_BOARD))
    assert dist[3] == Fraction(4, 16)


def brute_threes(b, token):
    n = 0
    for r, c in itertools.product(range(6), range(7)):
        for dr, dc in ((0, 1), (1, 0), (1, 1), (1, -1)):
            cells = [(r + i * dr, c + i * dc) for i in range(4)]
            if all(0 <= x < 6 and 0 <= y < 7 for x, y in cells):
                vals = [b[x * 7 + y] for x, y in cells]
                n += vals.count(token) == 3 and vals.count(E) == 1
    return n


def test_window_count():
    brute = 0
    for r, c in itertools.product(range(6), range(7)):
        for dr, dc in ((0, 1), (1, 0), (1, 1), (1, -1)):
            if all(0 <= r + i * dr < 6 and 0 <= c + i * dc < 7 for i in range(4)):
                brute += 1
    assert brute == len(c4.WINDOWS) == 69


def test_three_row_fixture():
    ref = board("AA..O.O")
    after = board("AAA.OOO")
    assert c4.count_threes(after, A) == brute_threes(after, A) == 1
    d = c4.c4_predicate("three_row", ref)
    assert d(after) and not d(ref)
    assert c4.c4_predicate("three_row", ref, strict=False)(ref)
    counter = c4.c4_predicate("counter_three_row", ref)
    assert counter(ref)
    mid = c4.c4_predicate("mid_column", c4.EMPTY_BOARD)
    assert mid(board("...A...")) and not mid(board("...O..."))
    with pytest.raises(MissingReference):
        c4.c4_predicate("three_row")
    with pytest.raises(UnknownPredicate):
        c4.c4_predicate("draw")


def test_validity():
    model = c4.Connect4Model()
    assert model.is_valid(c4.EMPTY_BOARD)
    assert model.is_valid(board("...AO.."))
    assert not model.is_valid(board("...OO.."))
    floating = list(c4.EMPTY_BOARD)
    floating[0] = A
    assert not model.is_valid(tuple(floating))


def test_board_rows_round_trip():
    b = board("AO.....")
    assert c4.board_from_rows(c4.board_rows(b)) == b
    with pytest.raises(ValueError):
        c4.board_from_rows(["..."])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=0, max_size=20), st.integers(0, 6))
def test_random_positions(moves, col):
    model = c4.Connect4Model()
    b = c4.EMPTY_BOARD
    for m in moves:
        if model.is_terminal(b) or b[m] != E:
            continue
        b = next(iter(sorted(model.support(b, m))))
    assert model.is_valid(b)
    assert c4.count_threes(b, A) == brute_threes(b, A)
    assert c4.count_threes(b, O) == brute_threes(b, O)
    if model.is_terminal(b) or b[col] != E:
        return
    out = model.support(b, col)
    assert out.mass() == 1
    assert all(model.is_valid(nb) for nb in out)
