#!/usr/bin/env python3
"""Run one or more sweep plans and print the per-point means.

    python3 scripts/run_plan.py scripts/plans/size_br.toml [more plans] [--out DIR]
"""
import argparse
import sys

from coordpop.experiments import ExperimentPlan, cmd_experiment


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("plans", nargs="+")
    ap.add_argument("--out")
    ap.add_argument("--replicates", type=int, help="override the plan's replicate count")
    args = ap.parse_args(argv)
    for path in args.plans:
        plan = ExperimentPlan.load(path)
        if args.out:
            plan.output = args.out
        if args.replicates:
            plan.replicates = args.replicates
        rows, summary, (csv_path, _) = cmd_experiment(plan)
        print(f"# {plan.name}: {len(rows)} rows -> {csv_path}")
        key = "mean_converted" if plan.sweep == "budget" else "mean_total_reward"
        for p in summary["points"]:
            print(f"{p['sweep_value']:>8g} {p['strategy']:>8s} {p[key]:12.6g}")
        print("spearman", {k: round(v, 3) for k, v in summary["spearman"].items()})
    return 0


if __name__ == "__main__":
    sys.exit(main())
