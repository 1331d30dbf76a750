"""Drone Coverage: four drones on a windy 10x10 map, explained from one drone.

Coordinates are ``(x, y)`` with ``y = 0`` the top row. After moving, a drone
is pushed one cell by the wind (left, down, right, up with probabilities
1/10, 1/5, 2/5, 3/10) unless it chose ``stop`` or the wind blows against its
move. Entering a tree, sharing a destination cell, or swapping cells with
another drone crashes the drones involved; crashed drones leave the map.

The explained drone ("ego") sees a 5x5 view centred on itself plus its
coordinates; those 27 features form the explanation vocabulary. The other
drones' positions and the ego crash flag are hidden context features so that
the dynamics stay Markovian.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from itertools import product

from ..core import Feature, FeatureSchema, Policy, State, TransitionModel, WeightedStates
from ..errors import IllegalAction, UnknownPredicate
from ..predicate import Native

ENV_ID = "drone_coverage"
SIZE = 10
N_DRONES = 4
UP, DOWN, LEFT, RIGHT, STOP = range(5)
ACTION_NAMES = ("up", "down", "left", "right", "stop")
DELTA = {UP: (0, -1), DOWN: (0, 1), LEFT: (-1, 0), RIGHT: (1, 0), STOP: (0, 0)}
OPPOSITE = {UP: DOWN, DOWN: UP, LEFT: RIGHT, RIGHT: LEFT}
WIND = ((LEFT, Fraction(1, 10)), (DOWN, Fraction(1, 5)), (RIGHT, Fraction(2, 5)), (UP, Fraction(3, 10)))
FREE, TREE, DRONE, OUT = "free", "tree", "drone", "out"
VIEW_VALUES = (FREE, TREE, DRONE, OUT)
CRASH_PENALTY = -10
N_VIEW = 25
X_IDX, Y_IDX = 25, 26
CRASHED_IDX = 30


class CrashedAgent(IllegalAction):
    pass


@dataclass(frozen=True)
class DcWorld:
    trees: frozenset
    drones: tuple
    ego: int = 0

    def __post_init__(self):
        object.__setattr__(self, "trees", frozenset(tuple(t) for t in self.trees))
        object.__setattr__(self, "drones", tuple(tuple(d) for d in self.drones))
        if len(self.drones) != N_DRONES:
            raise ValueError("the world has exactly four drones")
        if len(set(self.drones)) != N_DRONES or any(d in self.trees for d in self.drones):
            raise ValueError("drones must start on distinct free cells")
        if not 0 <= self.ego < N_DRONES:
            raise ValueError("ego index out of range")
        for c in (*self.trees, *self.drones):
            if not in_bounds(c):
                raise ValueError(f"cell {c} out of bounds")

    def to_json(self) -> dict:
        return {"trees": [list(t) for t in sorted(self.trees)],
                "drones": [list(d) for d in self.drones], "ego": self.ego}

    @classmethod
    def from_json(cls, obj: dict) -> "DcWorld":
        return cls(frozenset(tuple(t) for t in obj["trees"]),
                   tuple(tuple(d) for d in obj["drones"]), int(obj.get("ego", 0)))


def bundled_world() -> DcWorld:
    text = resources.files("hxplain.data").joinpath("dc_10x10.json").read_text()
    return DcWorld.from_json(json.loads(text))


def in_bounds(c) -> bool:
    return 0 <= c[0] < SIZE and 0 <= c[1] < SIZE


def _shift(c, a):
    dx, dy = DELTA[a]
    n = (c[0] + dx, c[1] + dy)
    return n if in_bounds(n) else c


def wind_outcomes(a: int) -> tuple:
    """``((wind direction or None, probability), ...)`` after choosing ``a``."""
    if a == STOP:
        return ((None, Fraction(1)),)
    return tuple((None if w == OPPOSITE[a] else w, p) for w, p in WIND)


def chebyshev(a, b) -> int:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def cover_cells(c):
    return [(c[0] + dx, c[1] + dy) for dy in (-1, 0, 1) for dx in (-1, 0, 1)]


def cover_score(pos, others, trees) -> int:
    """Cells of the 3x3 cover that are on the map, tree-free and not covered by another drone."""
    n = 0
    for cell in cover_cells(pos):
        if not in_bounds(cell) or cell in trees:
            continue
        if any(o is not None and chebyshev(cell, o) <= 1 for o in others):
            continue
        n += 1
    return n


def drone_reward(positions, i, trees) -> Fraction:
    """-1 when crashed, else the uncontested share of the drone's cover."""
    pos = positions[i]
    if pos is None:
        return Fraction(-1)
    others = [p for j, p in enumerate(positions) if j != i]
    return Fraction(cover_score(pos, others, trees), 9)


@lru_cache(maxsize=200_000)
def greedy_action(positions: tuple, i: int, trees: frozenset) -> int:
    """One-step lookahead over the drone's own wind, other drones held still.

    A move replaces ``stop`` only when its expected score is strictly higher;
    among moves the order is up, down, left, right.
    """
    pos = positions[i]
    if pos is None:
        return STOP
    others = [p for j, p in enumerate(positions) if j != i and p is not None]

    def value(a):
        total = Fraction(0)
        mid = _shift(pos, a)
        for w, p in wind_outcomes(a):
            final = mid if w is None else _shift(mid, w)
            if mid in trees or final in trees or final in others or mid in others:
                total += p * CRASH_PENALTY
            else:
                total += p * cover_score(final, others, trees)
        return total

    best, best_v = STOP, value(STOP)
    for a in (UP, DOWN, LEFT, RIGHT):
        v = value(a)
        if v > best_v:
            best, best_v = a, v
    return best


def resolve(positions: tuple, moves: tuple, trees) -> tuple:
    """Apply ``moves[i] = (action, wind)`` to every live drone and settle crashes."""
    mids, finals = list(positions), list(positions)
    crashed = [False] * len(positions)
    for i, pos in enumerate(positions):
        if pos is None:
            continue
        a, w = moves[i]
        mid = _shift(pos, a)
        final = mid if w is None else _shift(mid, w)
        mids[i], finals[i] = mid, final
        if mid in trees or final in trees:
            crashed[i] = True
    live = [i for i, p in enumerate(positions) if p is not None]
    for x in range(len(live)):
        for y in range(x + 1, len(live)):
            i, j = live[x], live[y]
            same = finals[i] == finals[j]
            swap = finals[i] == positions[j] and finals[j] == positions[i]
            if same or swap:
                crashed[i] = crashed[j] = True
    return tuple(finals), tuple(crashed)


def make_schema() -> FeatureSchema:
    cells = (None,) + tuple((x, y) for y in range(SIZE) for x in range(SIZE))
    feats = [Feature(f"V{dy:+d}{dx:+d}", VIEW_VALUES) for dy in range(-2, 3) for dx in range(-2, 3)]
    feats += [Feature("X", tuple(range(SIZE))), Feature("Y", tuple(range(SIZE)))]
    feats += [Feature(f"D{k}", cells, hidden=True) for k in range(1, N_DRONES)]
    feats.append(Feature("CRASHED", (False, True), hidden=True))
    return FeatureSchema(feats)


SCHEMA = make_schema()


def quadrant(c) -> int:
    return (1 if c[0] >= SIZE // 2 else 0) + (2 if c[1] >= SIZE // 2 else 0)


class DroneCoverageModel(TransitionModel):
    env_id = ENV_ID
    schema = SCHEMA

    def __init__(self, world: DcWorld, wind_mode: str = "ego"):
        if wind_mode not in ("ego", "joint"):
            raise ValueError(f"unknown wind mode {wind_mode!r}")
        self.world = world
        self.wind_mode = wind_mode
        self.trees = world.trees
        self.ego = world.ego
        self._cache: dict = {}

    def view(self, pos, others) -> tuple:
        occupied = {o for o in others if o is not None}
        out = []
        for dy in range(-2, 3):
            for dx in range(-2, 3):
                c = (pos[0] + dx, pos[1] + dy)
                if dx == 0 and dy == 0:
                    out.append(FREE)
                elif not in_bounds(c):
                    out.append(OUT)
                elif c in self.trees:
                    out.append(TREE)
                elif c in occupied:
                    out.append(DRONE)
                else:
                    out.append(FREE)
        return tuple(out)

    def make_state(self, positions: tuple, crashed: bool = False) -> State:
        ego_pos = positions[self.ego]
        others = tuple(p for j, p in enumerate(positions) if j != self.ego)
        return self.view(ego_pos, others) + (ego_pos[0], ego_pos[1]) + others + (crashed,)

    def initial_state(self) -> State:
        return self.make_state(self.world.drones)

    def positions(self, s: State) -> tuple:
        others = list(s[27:30])
        others.insert(self.ego, (s[X_IDX], s[Y_IDX]))
        return tuple(others)

    def is_terminal(self, s: State) -> bool:
        return s[CRASHED_IDX]

    def actions(self, s: State) -> list[int]:
        return [STOP] if s[CRASHED_IDX] else [UP, DOWN, LEFT, RIGHT, STOP]

    def support(self, s: State, a: int) -> WeightedStates:
        if s[CRASHED_IDX]:
            if a == STOP:
                return WeightedStates.point(s)
            raise CrashedAgent("the explained drone has crashed")
        if a not in DELTA:
            raise IllegalAction(f"unknown action {a}")
        hit = self._cache.get((s, a))
        if hit is not None:
            return hit
        joint = self.positions(s)
        acts = [a if j == self.ego else greedy_action(joint, j, self.trees)
                for j in range(N_DRONES)]
        per_drone = []
        for j, pos in enumerate(joint):
            if pos is None:
                per_drone.append(((None, Fraction(1)),))
            elif j == self.ego or self.wind_mode == "joint":
                per_drone.append(wind_outcomes(acts[j]))
            else:
                per_drone.append(((None, Fraction(1)),))
        acc: dict = {}
        for combo in product(*per_drone):
            p = Fraction(1)
            for _, q in combo:
                p *= q
            finals, crashed = resolve(joint, tuple((acts[j], combo[j][0]) for j in range(N_DRONES)),
                                      self.trees)
            new = tuple(None if (joint[j] is None or (crashed[j] and j != self.ego)) else finals[j]
                        for j in range(N_DRONES))
            st = self.make_state(new, crashed[self.ego])
            acc[st] = acc.get(st, Fraction(0)) + p
        out = WeightedStates(acc)
        self._cache[s, a] = out
        return out

    def branching_bound(self) -> int:
        return 4 if self.wind_mode == "ego" else 4 ** N_DRONES

    def reward(self, s: State, a: int) -> Fraction:
        total = Fraction(0)
        for st, p in self.support(s, a).items():
            joint = self.positions(st)
            if st[CRASHED_IDX]:
                joint = tuple(None if j == self.ego else q for j, q in enumerate(joint))
            total += p * drone_reward(joint, self.ego, self.trees)
        return total

    def is_valid(self, s: State) -> bool:
        pos = (s[X_IDX], s[Y_IDX])
        if pos in self.trees and not s[CRASHED_IDX]:
            return False
        others = s[27:30]
        if any(o == pos for o in others):
            return False
        live = [o for o in others if o is not None]
        if len(set(live)) != len(live) or any(o in self.trees for o in live):
            return False
        return tuple(s[:N_VIEW]) == self.view(pos, others)

    def action_name(self, a: int) -> str:
        return ACTION_NAMES[a]

    def config(self) -> dict:
        return {"world": self.world.to_json(), "wind_mode": self.wind_mode}


def dc_support(model: DroneCoverageModel, s: State, a: int) -> WeightedStates:
    return model.support(s, a)


def _view(s, dy, dx):
    return s[(dy + 2) * 5 + dx + 2]


_INNER = [(dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1)]


def _local_perfect(s) -> bool:
    if s[CRASHED_IDX]:
        return False
    if any(_view(s, dy, dx) == TREE for dy, dx in _INNER):
        return False
    return DRONE not in s[:N_VIEW]


def _global_positions(model, s):
    joint = model.positions(s)
    if s[CRASHED_IDX]:
        joint = tuple(None if j == model.ego else q for j, q in enumerate(joint))
    return joint


def _drone_perfect(joint, i, trees, full: bool) -> bool:
    pos = joint[i]
    if pos is None:
        return False
    if any(c in trees for c in cover_cells(pos)):
        return False
    if full and not all(in_bounds(c) for c in cover_cells(pos)):
        return False
    return all(o is None or chebyshev(pos, o) > 2 for j, o in enumerate(joint) if j != i)


def dc_predicate(model: DroneCoverageModel, name: str, scope: str = "local",
                 params: dict | None = None) -> Native:
    """``perfect_cover``, ``max_reward``, ``no_drones``, ``crash`` (holds while the
    drone is intact) or ``region``, in ``local`` or ``global`` scope."""
    params = dict(params or {})
    params["scope"] = scope
    trees = model.trees
    if scope not in ("local", "global"):
        raise UnknownPredicate(f"unknown scope {scope!r}")
    if scope == "local":
        if name == "perfect_cover":
            fn = _local_perfect
        elif name == "max_reward":
            fn = lambda s: _local_perfect(s) and all(_view(s, dy, dx) != OUT for dy, dx in _INNER)
        elif name == "no_drones":
            fn = lambda s: DRONE not in s[:N_VIEW]
        elif name == "crash":
            fn = lambda s: not s[CRASHED_IDX]
        elif name == "region":
            q = int(params.setdefault("quadrant", model.ego))
            fn = lambda s: not s[CRASHED_IDX] and quadrant((s[X_IDX], s[Y_IDX])) == q
        else:
            raise UnknownPredicate(f"drone coverage has no predicate {name!r}")
    else:
        n = N_DRONES
        if name in ("perfect_cover", "max_reward"):
            full = name == "max_reward"
            fn = lambda s: all(_drone_perfect(_global_positions(model, s), i, trees, full)
                               for i in range(n))
        elif name == "no_drones":
            def fn(s):
                joint = [p for p in _global_positions(model, s) if p is not None]
                return all(chebyshev(joint[i], joint[j]) > 2
                           for i in range(len(joint)) for j in range(i + 1, len(joint)))
        elif name == "crash":
            fn = lambda s: all(p is not None for p in _global_positions(model, s))
        elif name == "region":
            fn = lambda s: all(p is not None and quadrant(p) == i
                               for i, p in enumerate(_global_positions(model, s)))
        else:
            raise UnknownPredicate(f"drone coverage has no predicate {name!r}")
    return Native(ENV_ID, name, fn, params, SCHEMA)


class DcGreedyPolicy(Policy):
    def __init__(self, world: DcWorld, meta: dict | None = None):
        super().__init__(meta={"type": "heuristic", **(meta or {})})
        self.world = world
        self._model = DroneCoverageModel(world)

    def act(self, s: State) -> int:
        if s[CRASHED_IDX]:
            return STOP
        return greedy_action(self._model.positions(s), self.world.ego, self.world.trees)

    def to_json(self) -> dict:
        return {"type": "heuristic", "env": ENV_ID, "world": self.world.to_json(), "meta": self.meta}


def dc_greedy_policy(world: DcWorld) -> DcGreedyPolicy:
    return DcGreedyPolicy(world)
