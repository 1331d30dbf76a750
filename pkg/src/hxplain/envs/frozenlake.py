"""Slippery Frozen Lake.

Cells are ``(row, col)`` with row 0 at the top. A move goes in the chosen
direction with probability 3/5 and to each perpendicular neighbour with
probability 1/5; moves off the grid leave the agent in place. Holes and the
goal are absorbing.

State features: ``P`` position, ``PP`` previous position, ``HP`` a closest
hole (lexicographically smallest among the nearest by Manhattan distance),
``PD`` Manhattan distance from the start, ``HN`` number of holes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from ..core import Feature, FeatureSchema, Policy, State, TransitionModel, WeightedStates
from ..errors import IllegalAction, TerminalState, UnknownPredicate
from ..predicate import Native
from ..rng import py_random

ENV_ID = "frozen_lake"

LEFT, DOWN, RIGHT, UP, NOOP = range(5)
ACTION_NAMES = ("left", "down", "right", "up", "noop")
MOVES = {LEFT: (0, -1), DOWN: (1, 0), RIGHT: (0, 1), UP: (-1, 0)}
LATERAL = {LEFT: (UP, DOWN), RIGHT: (UP, DOWN), UP: (LEFT, RIGHT), DOWN: (LEFT, RIGHT)}
P_FORWARD = Fraction(3, 5)
P_SIDE = Fraction(1, 5)


@dataclass(frozen=True)
class FlMap:
    width: int
    height: int
    holes: frozenset
    start: tuple
    goal: tuple

    def __post_init__(self):
        object.__setattr__(self, "holes", frozenset(tuple(h) for h in self.holes))
        object.__setattr__(self, "start", tuple(self.start))
        object.__setattr__(self, "goal", tuple(self.goal))
        if self.start == self.goal:
            raise ValueError("start and goal must differ")
        if self.start in self.holes or self.goal in self.holes:
            raise ValueError("start and goal cannot be holes")
        if not self.holes:
            raise ValueError("a map needs at least one hole")
        for c in (self.start, self.goal, *self.holes):
            if not self.in_bounds(c):
                raise ValueError(f"cell {c} out of bounds")

    def in_bounds(self, c) -> bool:
        return 0 <= c[0] < self.height and 0 <= c[1] < self.width

    @property
    def cells(self) -> list:
        return [(r, c) for r in range(self.height) for c in range(self.width)]

    def to_json(self) -> dict:
        return {"width": self.width, "height": self.height, "start": list(self.start),
                "goal": list(self.goal), "holes": [list(h) for h in sorted(self.holes)]}

    @classmethod
    def from_json(cls, obj: dict) -> "FlMap":
        return cls(int(obj["width"]), int(obj["height"]),
                   frozenset(tuple(h) for h in obj["holes"]),
                   tuple(obj["start"]), tuple(obj["goal"]))


def bundled_map(name: str = "8x8") -> FlMap:
    """``"4x4"`` or ``"8x8"``: the usual layouts; not necessarily the maps of any published run."""
    text = resources.files("hxplain.data").joinpath(f"fl_{name}.json").read_text()
    return FlMap.from_json(json.loads(text))


def manhattan(a, b) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


class FrozenLakeModel(TransitionModel):
    env_id = ENV_ID

    def __init__(self, fl_map: FlMap):
        self.map = fl_map
        m = fl_map
        self._holes_sorted = sorted(m.holes)
        self.schema = FeatureSchema([
            Feature("P", tuple(m.cells)),
            Feature("PP", tuple(m.cells)),
            Feature("HP", tuple(self._holes_sorted)),
            Feature("PD", tuple(range(m.width + m.height - 1))),
            Feature("HN", tuple(range(m.width * m.height + 1))),
        ])
        self._nearest = {c: min(self._holes_sorted, key=lambda h: (manhattan(c, h), h))
                         for c in m.cells}
        self._outcomes = {}
        for c in m.cells:
            for a in MOVES:
                acc: dict = {}
                for b, p in ((a, P_FORWARD), (LATERAL[a][0], P_SIDE), (LATERAL[a][1], P_SIDE)):
                    dr, dc = MOVES[b]
                    n = (c[0] + dr, c[1] + dc)
                    if not m.in_bounds(n):
                        n = c
                    acc[n] = acc.get(n, Fraction(0)) + p
                self._outcomes[c, a] = tuple(acc.items())

    def make_state(self, P, PP=None, HN: int | None = None) -> State:
        P = tuple(P)
        PP = P if PP is None else tuple(PP)
        hn = len(self.map.holes) if HN is None else HN
        return (P, PP, self._nearest[P], manhattan(P, self.map.start), hn)

    def initial_state(self) -> State:
        return self.make_state(self.map.start)

    def is_terminal(self, s: State) -> bool:
        return s[0] in self.map.holes or s[0] == self.map.goal

    def actions(self, s: State) -> list[int]:
        return [NOOP] if self.is_terminal(s) else [LEFT, DOWN, RIGHT, UP]

    def support(self, s: State, a: int) -> WeightedStates:
        if self.is_terminal(s):
            if a == NOOP:
                return WeightedStates.point(s)
            raise TerminalState(f"position {s[0]} is terminal")
        if a not in MOVES:
            raise IllegalAction(f"unknown action {a}")
        P, hn = s[0], s[4]
        return WeightedStates(
            (self.make_state(n, P, hn), p) for n, p in self._outcomes[P, a])

    def branching_bound(self) -> int:
        return 3

    def reward(self, s: State, a: int) -> Fraction:
        if self.is_terminal(s):
            return Fraction(0)
        return sum((p for n, p in self._outcomes[s[0], a] if n == self.map.goal), Fraction(0))

    def is_valid(self, s: State) -> bool:
        P, PP, HP, PD, HN = s
        if HN != len(self.map.holes) or HP != self._nearest[P] or PD != manhattan(P, self.map.start):
            return False
        if PP in self.map.holes or PP == self.map.goal:
            return False
        if P == PP:
            return True
        return manhattan(P, PP) == 1

    def action_name(self, a: int) -> str:
        return ACTION_NAMES[a]

    def config(self) -> dict:
        return {"map": self.map.to_json()}


def fl_support(model: FrozenLakeModel, s: State, a: int) -> WeightedStates:
    return model.support(s, a)


def fl_predicate(model: FrozenLakeModel, name: str, params: dict | None = None) -> Native:
    params = dict(params or {})
    m = model.map
    if name == "win":
        goal = m.goal
        return Native(ENV_ID, name, lambda s: s[0] == goal, params, model.schema)
    if name == "holes":
        holes = m.holes
        return Native(ENV_ID, name, lambda s: s[0] in holes, params, model.schema)
    if name == "region":
        cells = frozenset(tuple(c) for c in params.get("cells", ()))
        if not cells:
            raise ValueError("region predicate needs a non-empty 'cells' list")
        params["cells"] = [list(c) for c in sorted(cells)]
        return Native(ENV_ID, name, lambda s: s[0] in cells, params, model.schema)
    raise UnknownPredicate(f"frozen lake has no predicate {name!r}")


class QTablePolicy(Policy):
    """Greedy policy of a Q-table indexed by position; ties go to the lowest action."""

    def __init__(self, fl_map: FlMap, q: dict, meta: dict | None = None):
        super().__init__(meta=meta)
        self.map = fl_map
        self.q = {tuple(c): list(v) for c, v in q.items()}
        self._greedy = {c: max(range(4), key=lambda a, v=v: (v[a], -a)) for c, v in self.q.items()}

    def act(self, s: State) -> int:
        P = s[0]
        if P in self.map.holes or P == self.map.goal:
            return NOOP
        return self._greedy.get(P, LEFT)

    def to_json(self) -> dict:
        return {"type": "q_table", "env": ENV_ID, "map": self.map.to_json(),
                "q": [[list(c), self.q[c]] for c in sorted(self.q)], "meta": self.meta}

    @classmethod
    def from_json(cls, obj: dict) -> "QTablePolicy":
        return cls(FlMap.from_json(obj["map"]), {tuple(c): v for c, v in obj["q"]}, obj.get("meta"))


def fl_train_q(fl_map: FlMap, episodes: int, alpha: float = 0.2, gamma: float = 0.99,
               epsilon_start: float = 1.0, epsilon_end: float = 0.05, decay_fraction: float = 0.5,
               seed: int = 0, max_steps: int = 200) -> QTablePolicy:
    """Tabular epsilon-greedy Q-learning; reward 1 on reaching the goal, else 0.

    Epsilon decays linearly from ``epsilon_start`` to ``epsilon_end`` over the
    first ``decay_fraction`` of the episodes.
    """
    rnd = py_random(seed, "train", ENV_ID)
    m = fl_map
    model = FrozenLakeModel(m)
    q = {c: [0.0, 0.0, 0.0, 0.0] for c in m.cells}
    terminal = set(m.holes) | {m.goal}
    table = {}
    for c in m.cells:
        for a in MOVES:
            cum, out = 0.0, []
            for n, p in model._outcomes[c, a]:
                cum += float(p)
                out.append((cum, n))
            table[c, a] = out
    decay_eps = max(1, int(episodes * decay_fraction))
    for ep in range(episodes):
        eps = epsilon_end + (epsilon_start - epsilon_end) * max(0.0, 1.0 - ep / decay_eps)
        c = m.start
        for _ in range(max_steps):
            qc = q[c]
            if rnd.random() < eps:
                a = rnd.randrange(4)
            else:
                a = max(range(4), key=lambda i: (qc[i], -i))
            u = rnd.random()
            out = table[c, a]
            n = out[-1][1]
            for cum, cell in out:
                if u < cum:
                    n = cell
                    break
            r = 1.0 if n == m.goal else 0.0
            target = r if n in terminal else r + gamma * max(q[n])
            qc[a] += alpha * (target - qc[a])
            c = n
            if c in terminal:
                break
    meta = {"type": "q_table", "episodes": episodes, "alpha": alpha, "gamma": gamma,
            "epsilon_start": epsilon_start, "epsilon_end": epsilon_end,
            "decay_fraction": decay_fraction, "seed": seed, "max_steps": max_steps}
    return QTablePolicy(m, q, meta)


def success_rate(model: FrozenLakeModel, policy: Policy, rollouts: int = 1000, seed: int = 0,
                 max_steps: int = 200) -> float:
    """Fraction of seeded rollouts from the start that reach the goal."""
    rnd = py_random(seed, "evaluate", ENV_ID)
    wins = 0
    for _ in range(rollouts):
        s = model.initial_state()
        for _ in range(max_steps):
            if model.is_terminal(s):
                break
            pairs = list(model.support(s, policy(s)).items())
            u, acc = rnd.random(), 0.0
            nxt = pairs[-1][0]
            for st, p in pairs:
                acc += float(p)
                if u < acc:
                    nxt = st
                    break
            s = nxt
        wins += s[0] == model.map.goal
    return wins / rollouts
