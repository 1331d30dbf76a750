"""Connect4 seen from the agent, with the opponent folded into the dynamics.

A board is a row-major tuple of 42 tokens (row 0 at the top): ``"."`` empty,
``"A"`` agent, ``"O"`` opponent. The agent moves first. One transition is an
agent drop followed, unless the game ended, by an opponent reply drawn from
the opponent model.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from ..core import Feature, FeatureSchema, Policy, State, TransitionModel, WeightedStates
from ..errors import IllegalAction, MissingReference, TerminalState, UnknownPredicate
from ..predicate import Native

ENV_ID = "connect4"
ROWS, COLS = 6, 7
EMPTY, AGENT, OPP = ".", "A", "O"
NOOP = COLS
MID = 3
CENTER_WEIGHTS = (1, 2, 3, 4, 3, 2, 1)


class IllegalColumn(IllegalAction):
    pass


class TerminalBoard(TerminalState):
    pass


def _lines():
    lines = []
    for r in range(ROWS):
        lines.append([r * COLS + c for c in range(COLS)])
    for c in range(COLS):
        lines.append([r * COLS + c for r in range(ROWS)])
    for start in range(-ROWS + 1, COLS):
        diag = [r * COLS + r + start for r in range(ROWS) if 0 <= r + start < COLS]
        anti = [r * COLS + (COLS - 1 - r - start) for r in range(ROWS) if 0 <= COLS - 1 - r - start < COLS]
        for line in (diag, anti):
            if len(line) >= 4:
                lines.append(line)
    return lines


LINES = _lines()
WINDOWS = [tuple(line[i:i + 4]) for line in LINES for i in range(len(line) - 3)]
_CELL_WINDOWS = [[w for w in WINDOWS if cell in w] for cell in range(ROWS * COLS)]
assert len(WINDOWS) == 69

SCHEMA = FeatureSchema(Feature(f"r{r}c{c}", (EMPTY, AGENT, OPP))
                       for r in range(ROWS) for c in range(COLS))
EMPTY_BOARD = (EMPTY,) * (ROWS * COLS)


def legal_columns(board: State) -> list[int]:
    return [c for c in range(COLS) if board[c] == EMPTY]


def drop(board: State, col: int, token: str) -> tuple[State, int]:
    """Place ``token`` in the lowest empty cell of ``col``."""
    for r in range(ROWS - 1, -1, -1):
        i = r * COLS + col
        if board[i] == EMPTY:
            b = list(board)
            b[i] = token
            return tuple(b), i
    raise IllegalColumn(f"column {col} is full")


def wins_at(board: State, cell: int) -> bool:
    """Whether the token at ``cell`` completes a four-window."""
    t = board[cell]
    for w in _CELL_WINDOWS[cell]:
        if board[w[0]] == t and board[w[1]] == t and board[w[2]] == t and board[w[3]] == t:
            return True
    return False


@lru_cache(maxsize=500_000)
def status(board: State) -> tuple[bool, bool, bool]:
    """``(agent has four, opponent has four, board full)``."""
    a4 = o4 = False
    for w in WINDOWS:
        t = board[w[0]]
        if t != EMPTY and board[w[1]] == t and board[w[2]] == t and board[w[3]] == t:
            if t == AGENT:
                a4 = True
            else:
                o4 = True
    return a4, o4, all(board[c] != EMPTY for c in range(COLS))


def count_threes(board: State, token: str) -> int:
    """Four-windows holding exactly three ``token`` and one empty cell."""
    n = 0
    for line in LINES:
        vals = [board[i] for i in line]
        for i in range(len(vals) - 3):
            seg = vals[i:i + 4]
            if seg.count(token) == 3 and seg.count(EMPTY) == 1:
                n += 1
    return n


def winning_columns(board: State, token: str) -> list[int]:
    out = []
    for c in legal_columns(board):
        b, cell = drop(board, c, token)
        if wins_at(b, cell):
            out.append(c)
    return out


def mid_margin(board: State) -> int:
    col = [board[r * COLS + MID] for r in range(ROWS)]
    return col.count(AGENT) - col.count(OPP)


class OpponentModel:
    """``uniform`` over legal replies, or ``heuristic``: take a win, else block, else
    draw columns in proportion to ``weights``."""

    def __init__(self, kind: str = "uniform", weights=CENTER_WEIGHTS):
        if kind not in ("uniform", "heuristic"):
            raise ValueError(f"unknown opponent model {kind!r}")
        self.kind = kind
        self.weights = tuple(int(w) for w in weights)

    def distribution(self, board: State) -> list[tuple[int, Fraction]]:
        legal = legal_columns(board)
        if self.kind == "uniform":
            return [(c, Fraction(1, len(legal))) for c in legal]
        for cols in (winning_columns(board, OPP), winning_columns(board, AGENT)):
            if cols:
                return [(c, Fraction(1, len(cols))) for c in cols]
        total = sum(self.weights[c] for c in legal)
        return [(c, Fraction(self.weights[c], total)) for c in legal]

    def to_json(self) -> dict:
        return {"kind": self.kind, "weights": list(self.weights)}

    @classmethod
    def from_json(cls, obj) -> "OpponentModel":
        if isinstance(obj, str):
            return cls(obj)
        return cls(obj.get("kind", "uniform"), obj.get("weights", CENTER_WEIGHTS))


class Connect4Model(TransitionModel):
    env_id = ENV_ID
    schema = SCHEMA

    def __init__(self, opponent: OpponentModel | None = None):
        self.opponent = opponent or OpponentModel()
        self._cache: dict = {}

    def initial_state(self) -> State:
        return EMPTY_BOARD

    def is_terminal(self, s: State) -> bool:
        a4, o4, full = status(s)
        return a4 or o4 or full

    def actions(self, s: State) -> list[int]:
        return [NOOP] if self.is_terminal(s) else legal_columns(s)

    def support(self, s: State, a: int) -> WeightedStates:
        if self.is_terminal(s):
            if a == NOOP:
                return WeightedStates.point(s)
            raise TerminalBoard("the game is over")
        if not 0 <= a < COLS or s[a] != EMPTY:
            raise IllegalColumn(f"column {a} is not playable")
        hit = self._cache.get((s, a))
        if hit is not None:
            return hit
        b1, cell = drop(s, a, AGENT)
        if wins_at(b1, cell) or not legal_columns(b1):
            out = WeightedStates.point(b1)
        else:
            out = WeightedStates((drop(b1, c, OPP)[0], p)
                                 for c, p in self.opponent.distribution(b1))
        self._cache[s, a] = out
        return out

    def branching_bound(self) -> int:
        return COLS

    def reward(self, s: State, a: int) -> Fraction:
        """Expected terminal payoff: 1 win, -1 loss, 1/2 draw."""
        if self.is_terminal(s):
            return Fraction(0)
        total = Fraction(0)
        for b, p in self.support(s, a).items():
            a4, o4, full = status(b)
            total += p * (1 if a4 else -1 if o4 else Fraction(1, 2) if full else 0)
        return total

    def is_valid(self, s: State) -> bool:
        for c in range(COLS):
            seen_empty_below = False
            for r in range(ROWS - 1, -1, -1):
                if s[r * COLS + c] == EMPTY:
                    seen_empty_below = True
                elif seen_empty_below:
                    return False
        diff = s.count(AGENT) - s.count(OPP)
        if diff not in (0, 1):
            return False
        a4, o4, _ = status(s)
        return not (a4 and o4)

    def action_name(self, a: int) -> str:
        return "noop" if a == NOOP else str(a)

    def config(self) -> dict:
        return {"opponent": self.opponent.to_json()}


def c4_support(board: State, a: int, opp: OpponentModel | None = None) -> WeightedStates:
    return Connect4Model(opp).support(board, a)


def c4_predicate(name: str, reference: State | None = None, strict: bool = True) -> Native:
    """``win``, ``lose``, or a comparison against ``reference`` (the history's first
    state): ``mid_column``, ``three_row``, ``counter_three_row``."""
    if name == "win":
        return Native(ENV_ID, name, lambda s: status(s)[0], {}, SCHEMA)
    if name == "lose":
        return Native(ENV_ID, name, lambda s: status(s)[1], {}, SCHEMA)
    if name not in ("mid_column", "three_row", "counter_three_row"):
        raise UnknownPredicate(f"connect4 has no predicate {name!r}")
    if reference is None:
        raise MissingReference(f"{name} compares against a reference board")
    ref = tuple(reference)
    params = {"reference": list(ref), "strict": bool(strict)}
    if name == "mid_column":
        m0 = mid_margin(ref)
        if strict:
            fn = lambda s: (m := mid_margin(s)) > 0 and m > m0
        else:
            fn = lambda s: (m := mid_margin(s)) > 0 and m >= m0
    elif name == "three_row":
        t0 = count_threes(ref, AGENT)
        fn = (lambda s: count_threes(s, AGENT) > t0) if strict else (lambda s: count_threes(s, AGENT) >= t0)
    else:
        t0 = count_threes(ref, OPP)
        fn = lambda s: count_threes(s, OPP) <= t0
    return Native(ENV_ID, name, fn, params, SCHEMA)


class C4HeuristicPolicy(Policy):
    """Win if possible, else block, else the legal column of highest weight."""

    def __init__(self, weights=CENTER_WEIGHTS, seed: int = 0):
        self.weights = tuple(int(w) for w in weights)
        super().__init__(meta={"type": "heuristic", "weights": list(self.weights), "seed": seed})
        self._cache: dict = {}

    def act(self, s: State) -> int:
        hit = self._cache.get(s)
        if hit is not None:
            return hit
        a4, o4, full = status(s)
        if a4 or o4 or full:
            a = NOOP
        else:
            win = winning_columns(s, AGENT)
            block = winning_columns(s, OPP)
            if win:
                a = win[0]
            elif block:
                a = block[0]
            else:
                a = max(legal_columns(s), key=lambda c: (self.weights[c], -c))
        self._cache[s] = a
        return a

    def to_json(self) -> dict:
        return {"type": "heuristic", "env": ENV_ID, "weights": list(self.weights),
                "meta": self.meta}


def c4_heuristic_policy(weights=CENTER_WEIGHTS, seed: int = 0) -> C4HeuristicPolicy:
    return C4HeuristicPolicy(weights, seed)


def board_from_rows(rows: list[str]) -> State:
    """Build a board from six 7-character strings, top row first."""
    if len(rows) != ROWS or any(len(r) != COLS for r in rows):
        raise ValueError("need 6 rows of 7 characters")
    return tuple(ch for row in rows for ch in row)


def board_rows(board: State) -> list[str]:
    return ["".join(board[r * COLS:(r + 1) * COLS]) for r in range(ROWS)]
