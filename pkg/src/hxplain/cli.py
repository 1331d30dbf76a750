"""``hxplain`` command line: train, rollout, explain, render, paxp.

Exit codes: 0 success, 2 bad arguments, 3 unsupported environment/trainer
pair, 4 invalid or mismatched input files, 5 a budget or size cap made the
requested computation infeasible.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from fractions import Fraction
from math import comb

from . import __version__
from .bhxp import BhxpConfig, explain_backward
from .errors import (
    BudgetExhausted,
    EmptyMatchSet,
    HxplainError,
    MissingReference,
    SchemaMismatch,
    SpaceTooLarge,
    UnknownPredicate,
)
from .envs import (
    build_model,
    connect4,
    drones,
    env_id,
    frozenlake,
    load_policy,
    native_factory,
    native_predicate,
    policy_to_json,
    sumgoal,
)
from .fhxp import explain_forward
from .io import (
    explanation_to_json,
    forward_to_json,
    history_from_json,
    history_to_json,
    manifest,
    read_json,
    write_json,
    write_text,
)
from .paxp import BhxpClassifier, PaxpConfig, enumerate_paxp, find_lm_paxp, subset_names
from .predicate import predicate_from_json
from .render import render_ascii, render_svg
from .scoring import ScoringBudget
from .simulate import rollout

EXIT_OK, EXIT_ARGS, EXIT_UNSUPPORTED, EXIT_INPUT, EXIT_BUDGET = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _non_negative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _budget(text: str) -> ScoringBudget | int:
    if text == "exhaustive":
        return ScoringBudget()
    try:
        return _positive(text)
    except argparse.ArgumentTypeError:
        raise argparse.ArgumentTypeError("budget is 'exhaustive' or a positive scenario count") from None


def _load(path: str, what: str):
    try:
        return read_json(path)
    except FileNotFoundError:
        raise CliError(EXIT_INPUT, f"{what} file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_INPUT, f"{what} file is not valid JSON: {exc}") from None


# train

def cmd_train(args) -> int:
    env = env_id(args.env)
    if env == sumgoal.ENV_ID:
        raise CliError(EXIT_UNSUPPORTED, "sumgoal has a fixed policy and nothing to train")
    config = {"env": env, "seed": args.seed}
    inputs = {}
    if env == frozenlake.ENV_ID:
        fl_map = _fl_map(args.map)
        if args.map not in (None, "4x4", "8x8"):
            inputs["map"] = args.map
        episodes = 200_000 if args.episodes is None else args.episodes
        if episodes == 0:
            warnings.warn("0 episodes: the policy is the greedy policy of an all-zero table")
        policy = frozenlake.fl_train_q(fl_map, episodes, seed=args.seed)
        model = frozenlake.FrozenLakeModel(fl_map)
        config["episodes"] = episodes
    elif env == connect4.ENV_ID:
        model = connect4.Connect4Model(connect4.OpponentModel(args.opponent))
        policy = connect4.c4_heuristic_policy(seed=args.seed)
        config["opponent"] = args.opponent
    else:
        world = _dc_world(args.world)
        if args.world is not None:
            inputs["world"] = args.world
        model = drones.DroneCoverageModel(world, args.wind)
        policy = drones.dc_greedy_policy(world)
        config["wind_mode"] = args.wind
    doc = policy_to_json(model, policy)
    doc["manifest"] = manifest("train", env, config, inputs)
    write_json(args.out, doc)
    return EXIT_OK


def _fl_map(spec: str | None) -> frozenlake.FlMap:
    if spec is None or spec in ("4x4", "8x8"):
        return frozenlake.bundled_map(spec or "8x8")
    try:
        return frozenlake.FlMap.from_json(_load(spec, "map"))
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(EXIT_INPUT, f"invalid map: {exc}") from None


def _dc_world(spec: str | None) -> drones.DcWorld:
    if spec is None:
        return drones.bundled_world()
    try:
        return drones.DcWorld.from_json(_load(spec, "world"))
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(EXIT_INPUT, f"invalid world: {exc}") from None


def _policy(path: str):
    doc = _load(path, "policy")
    try:
        model, policy = load_policy(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(EXIT_INPUT, f"invalid policy file: {exc}") from None
    return model, policy


# rollout

def cmd_rollout(args) -> int:
    model, policy = _policy(args.policy)
    if args.env is not None and env_id(args.env) != model.env_id:
        raise CliError(EXIT_INPUT, f"policy is for {model.env_id}, not {env_id(args.env)}")
    H = rollout(model, policy, args.steps, args.seed)
    H.validate(model)
    run = manifest("rollout", model.env_id, {"steps": args.steps, "seed": args.seed},
                   {"policy": args.policy})
    write_json(args.out, history_to_json(H, model, run))
    return EXIT_OK


# explain

def _history(path: str, model):
    doc = _load(path, "history")
    try:
        env = env_id(doc.get("env", ""))
    except ValueError:
        env = None
    if env != model.env_id:
        raise CliError(EXIT_INPUT, f"history env {doc.get('env')!r} does not match the policy")
    if doc.get("env_config") is not None and doc["env_config"] != model.config():
        raise CliError(EXIT_INPUT, "history and policy were made for different environment configurations")
    H = history_from_json(doc, model.schema)
    H.validate(model)
    return H


def _predicate(spec: str, model, reference):
    if os.path.isfile(spec):
        obj = _load(spec, "predicate")
    elif spec.lstrip().startswith("{"):
        try:
            obj = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise CliError(EXIT_INPUT, f"predicate is not valid JSON: {exc}") from None
    else:
        return native_predicate(model, spec, None, reference)
    if "type" not in obj:
        obj = {"type": "native", **obj}
    return predicate_from_json(obj, model.schema, native_factory(model, reference))


def _paxp_config(args) -> PaxpConfig:
    mode = args.paxp_mode
    if mode is None:
        mode = "sampled" if args.sample is not None else "exhaustive"
    sampled = mode.startswith("sampled")
    space = "valid_states" if mode.endswith("-valid") else "feature_space"
    return PaxpConfig(delta=args.delta, proportion_mode="sampled" if sampled else "exhaustive",
                      sample=args.sample or 10, seed=args.seed, sample_space=space)


def cmd_explain(args) -> int:
    model, policy = _policy(args.policy)
    H = _history(args.history, model)
    d = _predicate(args.predicate, model, H.states[0])
    budget = args.budget
    if isinstance(budget, int):
        budget = ScoringBudget.max_scenarios(budget, args.seed)
    inputs = {"history": args.history, "policy": args.policy}
    if os.path.isfile(args.predicate):
        inputs["predicate"] = args.predicate
    if args.mode == "forward":
        F = explain_forward(model, policy, H, d, budget)
        config = {"mode": "forward", "predicate": d.to_json(), "budget": budget.to_json()}
        run = manifest("explain", model.env_id, config, inputs, F.deviations)
        write_json(args.out, forward_to_json(F, model, config, run))
        return EXIT_OK
    cfg = BhxpConfig(l=args.l, delta=args.delta, paxp=_paxp_config(args), budget=budget)
    E = explain_backward(model, policy, H, d, cfg)
    config = {"mode": "backward", "predicate": d.to_json(), **cfg.to_json()}
    run = manifest("explain", model.env_id, config, inputs, E.deviations)
    write_json(args.out, explanation_to_json(E, model, config, run))
    return EXIT_OK


# render

def cmd_render(args) -> int:
    doc = _load(args.history, "history")
    try:
        model = build_model(doc["env"], doc.get("env_config") or {})
        H = history_from_json(doc, model.schema)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(EXIT_INPUT, f"invalid history: {exc}") from None
    expl = None
    if args.explanation:
        expl = _load(args.explanation, "explanation")
        env = (expl.get("manifest") or {}).get("env")
        if env is not None and env != model.env_id:
            raise CliError(EXIT_INPUT, "explanation and history come from different environments")
        idx = [st["index"] for st in expl.get("steps", [])] + [r["index"] for r in expl.get("scores", [])]
        if any(not 0 <= i < H.k for i in idx):
            raise CliError(EXIT_INPUT, "explanation indices do not fit the history")
        for st in expl.get("steps", []):
            if H.actions[st["index"]] != st["action"]:
                raise CliError(EXIT_INPUT, "explanation actions do not match the history")
    text = render_svg(model, H, expl) if args.format == "svg" else render_ascii(model, H, expl)
    write_text(args.out, text)
    return EXIT_OK


# paxp

def cmd_paxp(args) -> int:
    if env_id(args.env) != sumgoal.ENV_ID:
        raise CliError(EXIT_UNSUPPORTED, "the paxp command runs on the sumgoal fixture")
    n = args.n
    if n < 3 or n % 2 == 0:
        raise CliError(EXIT_ARGS, "n must be odd and at least 3")
    model = sumgoal.SumGoalModel(n)
    policy = sumgoal.sumgoal_policy(n)
    d = sumgoal.sumgoal_predicate(n)
    v = sumgoal.near_goal_state(n)
    kappa = BhxpClassifier(v, model, policy, d, 1)
    sampled = args.sample is not None
    cfg = PaxpConfig(delta=args.delta, proportion_mode="sampled" if sampled else "exhaustive",
                     sample=args.sample or 10, seed=args.seed)
    values = " ".join(str(x) for x in v[:n])
    print(f"sumgoal n={n} anchor=({values}) delta={cfg.delta} "
          f"mode={cfg.proportion_mode}" + (f" sample={cfg.sample} seed={cfg.seed}" if sampled else ""))
    if args.enumerate:
        if sampled:
            raise CliError(EXIT_ARGS, "--enumerate needs exact proportions; drop --sample")
        sets = sorted(enumerate_paxp(kappa, v, cfg), key=lambda s: (len(s), sorted(s)))
        for X in sets:
            print("{" + ", ".join(subset_names(model.schema, X)) + "}")
        print(f"count {len(sets)} (binomial({n - 1}, {(n - 1) // 2}) = {comb(n - 1, (n - 1) // 2)})")
    else:
        X = find_lm_paxp(kappa, v, cfg)
        print("lm {" + ", ".join(subset_names(model.schema, X)) + "}")
        print(f"size {len(X)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hxplain", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"hxplain {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train (fl) or build (c4, dc) a policy")
    t.add_argument("--env", required=True, choices=["fl", "c4", "dc", "sumgoal"])
    t.add_argument("--map", help="frozen lake map JSON, or the bundled 4x4 / 8x8 (default)")
    t.add_argument("--world", help="drone coverage world JSON (default: bundled)")
    t.add_argument("--episodes", type=_non_negative)
    t.add_argument("--opponent", choices=["uniform", "heuristic"], default="uniform")
    t.add_argument("--wind", choices=["ego", "joint"], default="ego")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", required=True)
    t.set_defaults(fn=cmd_train)

    r = sub.add_parser("rollout", help="record a history")
    r.add_argument("--env", choices=["fl", "c4", "dc", "sumgoal"])
    r.add_argument("--policy", required=True)
    r.add_argument("--steps", type=_positive, required=True)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", required=True)
    r.set_defaults(fn=cmd_rollout)

    e = sub.add_parser("explain", help="forward or backward explanation of a history")
    e.add_argument("--mode", choices=["forward", "backward"], default="backward")
    e.add_argument("--history", required=True)
    e.add_argument("--policy", required=True)
    e.add_argument("--predicate", required=True,
                   help="predicate name, inline JSON or a JSON file")
    e.add_argument("--l", type=_positive, default=4)
    e.add_argument("--delta", type=_fraction, default=Fraction(1))
    e.add_argument("--sample", type=_positive)
    e.add_argument("--paxp-mode", choices=["exhaustive", "sampled", "exhaustive-valid", "sampled-valid"])
    e.add_argument("--budget", type=_budget, default=ScoringBudget())
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out", required=True)
    e.set_defaults(fn=cmd_explain)

    v = sub.add_parser("render", help="draw a history and its explanation")
    v.add_argument("--history", required=True)
    v.add_argument("--explanation")
    v.add_argument("--format", choices=["ascii", "svg"], default="ascii")
    v.add_argument("--out", required=True)
    v.set_defaults(fn=cmd_render)

    x = sub.add_parser("paxp", help="explanations of the sumgoal fixture")
    x.add_argument("--env", required=True, choices=["sumgoal"])
    x.add_argument("--n", type=int, required=True)
    group = x.add_mutually_exclusive_group(required=True)
    group.add_argument("--enumerate", action="store_true")
    group.add_argument("--lm", action="store_true")
    x.add_argument("--delta", type=_fraction, default=Fraction(1))
    x.add_argument("--sample", type=_positive)
    x.add_argument("--seed", type=int, default=0)
    x.set_defaults(fn=cmd_paxp)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"hxplain: {exc}", file=sys.stderr)
        return exc.code
    except (BudgetExhausted, SpaceTooLarge, EmptyMatchSet) as exc:
        print(f"hxplain: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (SchemaMismatch, UnknownPredicate, MissingReference, HxplainError, ValueError,
            KeyError, TypeError) as exc:
        print(f"hxplain: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
