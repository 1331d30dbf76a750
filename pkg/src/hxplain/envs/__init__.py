"""Environments: Frozen Lake, Connect4, Drone Coverage and the SumGoal fixture.

The helpers here rebuild a model, its policy and its named predicates from
the JSON documents the command line reads and writes.
"""

from __future__ import annotations

from ..core import Policy, State, TransitionModel
from ..errors import SchemaMismatch, UnknownPredicate
from ..predicate import Predicate
from . import connect4, drones, frozenlake, sumgoal

ALIASES = {
    "fl": frozenlake.ENV_ID, frozenlake.ENV_ID: frozenlake.ENV_ID,
    "c4": connect4.ENV_ID, connect4.ENV_ID: connect4.ENV_ID,
    "dc": drones.ENV_ID, drones.ENV_ID: drones.ENV_ID,
    "sumgoal": sumgoal.ENV_ID,
}


def env_id(name: str) -> str:
    try:
        return ALIASES[name]
    except KeyError:
        raise ValueError(f"unknown environment {name!r}") from None


def build_model(env: str, config: dict) -> TransitionModel:
    env = env_id(env)
    if env == frozenlake.ENV_ID:
        return frozenlake.FrozenLakeModel(frozenlake.FlMap.from_json(config["map"]))
    if env == connect4.ENV_ID:
        return connect4.Connect4Model(connect4.OpponentModel.from_json(config.get("opponent", "uniform")))
    if env == drones.ENV_ID:
        return drones.DroneCoverageModel(drones.DcWorld.from_json(config["world"]),
                                         config.get("wind_mode", "ego"))
    return sumgoal.SumGoalModel(int(config["n"]))


def policy_to_json(model: TransitionModel, policy: Policy) -> dict:
    """Policy document carrying the environment configuration it was built for."""
    doc = policy.to_json()
    doc["env_config"] = model.config()
    return doc


def load_policy(doc: dict) -> tuple[TransitionModel, Policy]:
    """Rebuild ``(model, policy)`` from a policy document."""
    env = env_id(doc["env"])
    kind = doc.get("type")
    cfg = doc.get("env_config") or {}
    if env == frozenlake.ENV_ID:
        if kind != "q_table":
            raise SchemaMismatch("frozen lake policies are q-tables")
        policy = frozenlake.QTablePolicy.from_json(doc)
        return frozenlake.FrozenLakeModel(policy.map), policy
    if kind != "heuristic":
        raise SchemaMismatch(f"{env} policies are heuristic")
    if env == connect4.ENV_ID:
        meta = doc.get("meta") or {}
        policy = connect4.C4HeuristicPolicy(doc.get("weights", connect4.CENTER_WEIGHTS),
                                            meta.get("seed", 0))
        return build_model(env, cfg), policy
    if env == drones.ENV_ID:
        world = drones.DcWorld.from_json(doc["world"])
        model = drones.DroneCoverageModel(world, cfg.get("wind_mode", "ego"))
        return model, drones.DcGreedyPolicy(world)
    n = int(doc["n"])
    return sumgoal.SumGoalModel(n), sumgoal.ThresholdPolicy(n)


def native_predicate(model: TransitionModel, name: str, params: dict | None = None,
                     reference: State | None = None) -> Predicate:
    """Named predicate of ``model``'s environment.

    Comparative Connect4 predicates take their reference board from
    ``params["reference"]`` or, failing that, from ``reference``.
    """
    params = dict(params or {})
    env = model.env_id
    if env == frozenlake.ENV_ID:
        return frozenlake.fl_predicate(model, name, params)
    if env == connect4.ENV_ID:
        ref = params.get("reference")
        ref = tuple(ref) if ref is not None else reference
        return connect4.c4_predicate(name, ref, params.get("strict", True))
    if env == drones.ENV_ID:
        scope = params.pop("scope", "local")
        return drones.dc_predicate(model, name, scope, params)
    if env == sumgoal.ENV_ID:
        if name != "goal":
            raise UnknownPredicate(f"sumgoal has no predicate {name!r}")
        return sumgoal.sumgoal_predicate(model.n)
    raise UnknownPredicate(f"no predicates for {env!r}")


def native_factory(model: TransitionModel, reference: State | None = None):
    return lambda name, params: native_predicate(model, name, params, reference)
