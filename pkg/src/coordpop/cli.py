"""Command line front end.

    coordpop simulate   run dynamics and write a trace
    coordpop check      run a property checker (exit 0 holds, 1 counterexample, 2 over budget)
    coordpop control    uniform, targeted or budgeted reward control
    coordpop experiment size or budget sweep from a TOML/JSON plan
    coordpop examples   list or run the bundled fixtures

Input errors exit with status 3.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import exemplars
from .analysis import (DEFAULT_MAX_PAIRS, BudgetExceeded, check_A_coordinating_agent, check_coordinating,
                       check_coordinating_agent, check_coordinating_tiebreaker, check_restrictive_coordinating,
                       check_supermodular_utility)
from .control import EPSILON, STRATEGIES, NotEquilibrium, dump_result, targeted_control, uniform_reward
from .core import ActivationSequence, ChoiceAlphabet, Population, dump_trace, run
from .experiments import ExperimentPlan, PlanError, cmd_experiment, default_output_dir
from .netgames import NetworkGame, RuleGame
from .pgg import PublicGoodsGame

EXIT_HOLDS, EXIT_COUNTEREXAMPLE, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


def load_spec(path):
    """A game spec JSON; public goods games are recognised by their ``r`` key."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read spec {path}: {e}") from None
    try:
        game = PublicGoodsGame.from_json(doc) if "r" in doc else NetworkGame.from_json(doc)
    except (KeyError, ValueError, TypeError) as e:
        raise InputError(f"malformed spec {path}: {e}") from None
    return game, doc.get("x0")


def _target(args):
    """(population-or-game, x0 labels or indices, default sequence)."""
    if args.example and args.spec:
        raise InputError("give either --example or --spec")
    if args.example:
        try:
            obj, x0, seq = exemplars.get(args.example)
        except KeyError as e:
            raise InputError(str(e)) from None
    elif args.spec:
        obj, x0 = load_spec(args.spec)
        seq = ActivationSequence.round_robin()
        if x0 is not None:
            x0 = obj.alphabet.encode(x0)
    else:
        raise InputError("need --example or --spec")
    if getattr(args, "x0", None):
        x0 = _alpha(obj).encode(args.x0.split(","))
    return obj, x0, seq


def _alpha(obj) -> ChoiceAlphabet:
    return obj.alphabet


def _pop(obj) -> Population:
    return obj.population() if isinstance(obj, RuleGame) else obj


def _sequence(args, n, default):
    kind = args.seq
    if kind is None:
        return default
    if kind == "roundrobin":
        return ActivationSequence.round_robin()
    if kind == "uniform":
        return ActivationSequence.uniform(args.seed)
    if kind == "explicit":
        if not args.order:
            raise InputError("--seq explicit needs --order")
        return ActivationSequence.explicit([int(a) for a in args.order.split(",")], repeat=args.repeat)
    raise InputError(f"unknown sequence {kind!r}")


def cmd_simulate(args):
    obj, x0, seq = _target(args)
    pop = _pop(obj)
    if x0 is None:
        raise InputError("no initial state; pass --x0")
    seq = _sequence(args, pop.n, seq)
    detect = args.detect_cycles
    if detect == "auto":
        detect = seq.period(pop.n) is not None
    try:
        tr = run(pop, x0, seq, max_steps=args.max_steps, detect_cycles=detect,
                 snapshot_every=args.snapshot_every)
    except ValueError as e:
        raise InputError(str(e)) from None
    print(f"verdict: {tr.verdict}")
    print("final:", ",".join(map(str, pop.alphabet.decode(tr.final))))
    if args.out:
        dump_trace(tr, args.out, pop.alphabet)
        print(f"trace written to {args.out}")
    return 0


def cmd_check(args):
    obj, x0, _ = _target(args)
    pop = _pop(obj)
    kw = {"max_pairs": args.max_pairs}
    prop = args.property
    try:
        if prop == "coordinating":
            if args.agent is not None:
                v = check_coordinating_agent(pop, args.agent, sample=args.sample, seed=args.seed, **kw)
            else:
                v = check_coordinating(pop, sample=args.sample, seed=args.seed, **kw)
        elif prop == "restrictive":
            v = check_restrictive_coordinating(pop, sample=args.sample, seed=args.seed, **kw)
        elif prop == "A-coordinating":
            if args.choice is None:
                raise InputError("A-coordinating needs --choice")
            a = pop.alphabet.index(args.choice)
            agents = [args.agent] if args.agent is not None else range(pop.n)
            for i in agents:
                v = check_A_coordinating_agent(pop, i, a, sample=args.sample, seed=args.seed, **kw)
                if not v.holds:
                    break
        elif prop == "tiebreaker":
            if not isinstance(obj, RuleGame):
                raise InputError("tie breaker checks need a game")
            i = args.agent or 0
            v = check_coordinating_tiebreaker(obj.tiebreakers[i], pop, i, **kw)
        elif prop == "supermodular":
            if not hasattr(obj, "utility"):
                raise InputError("supermodularity needs a utility; pass a game spec")
            agents = [args.agent] if args.agent is not None else range(pop.n)
            for i in agents:
                v = check_supermodular_utility(lambda x, i=i: obj.utility(x, i), pop.n, i, k=pop.k, **kw)
                if not v.holds:
                    break
        else:
            raise InputError(f"unknown property {prop!r}")
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}")
        return EXIT_BUDGET
    print(v.summary(pop.alphabet))
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(v.to_json(pop.alphabet), fh, indent=1)
    return EXIT_HOLDS if v.holds else EXIT_COUNTEREXAMPLE


def cmd_control(args):
    obj, x0, _ = _target(args)
    if not isinstance(obj, RuleGame):
        raise InputError("control needs a network game")
    if x0 is None:
        raise InputError("no start state; pass --x0")
    try:
        if args.problem == "uniform":
            res = uniform_reward(obj, x0, epsilon=args.epsilon)
            if not res.solvable:
                print("no finite r*")
            else:
                print(f"r* = {res.reward:.9g} (apply r* + {args.epsilon:g})")
            if args.out:
                with open(args.out, "w") as fh:
                    json.dump(res.to_json(), fh, indent=1)
            return 0
        budget = None
        if args.problem == "budgeted":
            if args.budget is None:
                raise InputError("--problem budgeted needs --budget")
            budget = args.budget
        res = targeted_control(obj, x0, args.strategy, args.epsilon, budget=budget, seed=args.seed)
    except NotEquilibrium as e:
        raise InputError(str(e)) from None
    except ValueError as e:
        raise InputError(str(e)) from None
    print(f"total reward: {res.cost:.9g}")
    print(f"converted: {res.converted}/{len(res.final)}")
    print("order:", " ".join(f"{a}:{r:.6g}" for a, r in res.order) or "(none)")
    if res.residue:
        print("unconverted:", " ".join(map(str, res.residue)))
    if args.out:
        dump_result(res, args.out, obj.alphabet)
    return 0


def cmd_experiment_cli(args):
    try:
        plan = ExperimentPlan.load(args.plan)
    except (OSError, PlanError, TypeError, ValueError) as e:
        raise InputError(f"bad plan: {e}") from None
    if args.out:
        plan.output = args.out
    if args.seed is not None:
        plan.seed = args.seed
    if args.workers:
        plan.workers = args.workers

    def progress(k, total):
        print(f"\r{k}/{total}", end="", file=sys.stderr, flush=True)

    rows, _, (csv_path, json_path) = cmd_experiment(plan, progress)
    print(file=sys.stderr)
    print(f"{len(rows)} rows -> {csv_path}")
    print(f"summary -> {json_path}")
    return 0


def cmd_examples(args):
    if args.action == "list":
        for name, desc in exemplars.REGISTRY.items():
            print(f"{name:14s} {desc}")
        return 0
    if not args.name:
        raise InputError("examples run needs a name")
    ns = argparse.Namespace(example=args.name, spec=None, x0=None, seq=None, seed=args.seed, order=None,
                            repeat=False, max_steps=args.max_steps, detect_cycles="auto", snapshot_every=None,
                            out=args.out)
    return cmd_simulate(ns)


def _source(p):
    p.add_argument("--example", help="bundled fixture name (see `examples list`)")
    p.add_argument("--spec", help="game spec JSON")
    p.add_argument("--x0", help="comma separated start labels")


def build_parser():
    ap = argparse.ArgumentParser(prog="coordpop", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("simulate", help="run the dynamics")
    _source(p)
    p.add_argument("--seq", choices=("roundrobin", "uniform", "explicit"))
    p.add_argument("--order", help="agents for --seq explicit, comma separated, zero-based")
    p.add_argument("--repeat", action="store_true", help="repeat the explicit order forever")
    p.add_argument("--max-steps", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--detect-cycles", action="store_true")
    p.add_argument("--snapshot-every", type=int)
    p.add_argument("--out", help="trace file (.json or .csv)")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("check", help="run a property checker")
    _source(p)
    p.add_argument("property", choices=("coordinating", "restrictive", "A-coordinating", "tiebreaker",
                                         "supermodular"))
    p.add_argument("--choice", help="the choice A for A-coordinating")
    p.add_argument("--agent", type=int)
    p.add_argument("--max-pairs", type=int, default=DEFAULT_MAX_PAIRS)
    p.add_argument("--sample", type=int, help="sample this many pairs when over budget")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("control", help="incentive control")
    _source(p)
    p.add_argument("--problem", choices=("uniform", "targeted", "budgeted"), default="targeted")
    p.add_argument("--budget", type=float)
    p.add_argument("--strategy", choices=STRATEGIES, default="inro")
    p.add_argument("--epsilon", type=float, default=EPSILON)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_control)

    p = sub.add_parser("experiment", help="run a sweep plan")
    p.add_argument("plan", help="TOML or JSON plan")
    p.add_argument("--out", help=f"output directory (default ${'COORDPOP_OUT'} or {default_output_dir()!r})")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.set_defaults(fn=cmd_experiment_cli)

    p = sub.add_parser("examples", help="bundled fixtures")
    p.add_argument("action", choices=("list", "run"))
    p.add_argument("name", nargs="?")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_examples)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
