"""Seeded closed-loop rollouts that record histories."""

from __future__ import annotations

from .core import History, Policy, State, TransitionModel, support
from .rng import substream


def sample_successor(rng, model: TransitionModel, s: State, a: int) -> State:
    pairs = list(support(model, s, a).items())
    u, acc = rng.random(), 0.0
    for st, p in pairs:
        acc += float(p)
        if u < acc:
            return st
    return pairs[-1][0]


def rollout(model: TransitionModel, policy: Policy, steps: int, seed: int = 0,
            start: State | None = None, stream: tuple = ()) -> History:
    """Up to ``steps`` policy actions from ``start``; stops early on a terminal state.

    ``stream`` extends the random stream labels, so several histories can be
    drawn from one seed.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    rng = substream(seed, "rollout", model.env_id, *stream)
    s = model.initial_state() if start is None else tuple(start)
    states, actions = [s], []
    terminal = False
    for _ in range(steps):
        if model.is_terminal(s):
            terminal = True
            break
        a = policy(s)
        s = sample_successor(rng, model, s, a)
        states.append(s)
        actions.append(a)
    if not terminal and model.is_terminal(s):
        terminal = True
    return History(model.schema, states, actions, model.env_id, terminal)
