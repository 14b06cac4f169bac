"""Size and budget sweeps over generated instances.

Results CSV columns (stable):
    sweep, sweep_value, strategy, replicate, total_reward, converted, n, wall_ms, seed
The summary JSON holds mean and standard error per (sweep_value, strategy).
"""
from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .control import EPSILON, OPTIMAL_MAX_N, STRATEGIES, targeted_control
from .scenarios import MIXES, GenSpec, generate_instance

OUTPUT_ENV = "COORDPOP_OUT"
RESULT_FIELDS = ("sweep", "sweep_value", "strategy", "replicate", "total_reward", "converted", "n",
                 "wall_ms", "seed")


class PlanError(ValueError):
    pass


def default_output_dir() -> str:
    return os.environ.get(OUTPUT_ENV, "results")


@dataclass
class ExperimentPlan:
    sweep: str = "size"  # size | budget
    values: list = field(default_factory=lambda: [20, 40, 60])
    replicates: int = 10
    network: str = "br"  # br | im | mixed | all
    strategies: list = field(default_factory=lambda: ["inro", "degree", "random"])
    genspec: dict = field(default_factory=dict)
    output: str = ""
    seed: int = 0
    epsilon: float = EPSILON
    # budget sweeps: values are fractions of the instance's unbudgeted INRO cost
    relative_budget: bool = False
    workers: int = 1
    name: str = "experiment"

    def __post_init__(self):
        self.strategies = [s.lower() for s in self.strategies]
        self.validate()

    def validate(self):
        if self.sweep not in ("size", "budget"):
            raise PlanError(f"sweep must be size or budget, not {self.sweep!r}")
        if self.replicates < 1:
            raise PlanError("replicates must be at least 1")
        if self.network not in MIXES:
            raise PlanError(f"unknown network type {self.network!r}")
        if not self.values:
            raise PlanError("empty sweep")
        for s in self.strategies:
            if s not in STRATEGIES:
                raise PlanError(f"unknown strategy {s!r}")
        if "ipro-br" in self.strategies and self.network != "br":
            raise PlanError("ipro-br is only defined on best-responder networks")
        if "ipro-im" in self.strategies and self.network != "im":
            raise PlanError("ipro-im is only defined on imitator networks")
        if "optimal" in self.strategies and max(self.sizes()) > OPTIMAL_MAX_N:
            raise PlanError(f"optimal search is limited to n <= {OPTIMAL_MAX_N}")
        if self.sweep == "budget" and min(self.values) < 0:
            raise PlanError("budgets must be nonnegative")

    def sizes(self):
        if self.sweep == "size":
            return [int(v) for v in self.values]
        return [int(self.genspec.get("n", GenSpec.n))]

    def out_dir(self):
        return self.output or default_output_dir()

    def to_json(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise PlanError(f"unknown plan keys {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path):
        path = str(path)
        if path.endswith(".toml"):
            try:
                import tomllib
            except ModuleNotFoundError:  # python < 3.11
                import tomli as tomllib
            with open(path, "rb") as fh:
                return cls.from_dict(tomllib.load(fh))
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def instance_seed(plan: ExperimentPlan, value_index: int, replicate: int) -> int:
    # budget sweeps reuse one instance per replicate across the grid
    if plan.sweep == "budget":
        value_index = 0
    return int(plan.seed) * 1_000_003 + value_index * 10_007 + replicate


def _instance(plan, n, seed):
    g = {**plan.genspec, "n": n, "seed": seed, "mix": plan.network}
    return generate_instance(GenSpec.from_dict(g))


def _task(args):
    plan, vi, rep = args
    rows = []
    seed = instance_seed(plan, vi, rep)
    if plan.sweep == "size":
        n = int(plan.values[vi])
        inst = _instance(plan, n, seed)
        for s in plan.strategies:
            res = targeted_control(inst.game, inst.x0, s, plan.epsilon, seed=seed)
            rows.append(_row(plan, plan.values[vi], s, rep, res, seed))
        return rows
    # budget sweep: the whole grid on one instance
    inst = _instance(plan, plan.sizes()[0], seed)
    scale = 1.0
    if plan.relative_budget:
        scale = targeted_control(inst.game, inst.x0, "inro", plan.epsilon, seed=seed).cost
    for s in plan.strategies:
        for v in plan.values:
            res = targeted_control(inst.game, inst.x0, s, plan.epsilon, budget=float(v) * scale, seed=seed)
            rows.append(_row(plan, v, s, rep, res, seed))
    return rows


def _row(plan, value, strategy, rep, res, seed):
    return {"sweep": plan.sweep, "sweep_value": value, "strategy": strategy, "replicate": rep,
            "total_reward": res.cost, "converted": res.converted, "n": len(res.x0),
            "wall_ms": round(res.wall_ms, 3), "seed": seed}


def run_plan(plan: ExperimentPlan, progress=None) -> list:
    tasks = []
    if plan.sweep == "size":
        tasks = [(plan, vi, r) for vi in range(len(plan.values)) for r in range(plan.replicates)]
    else:
        tasks = [(plan, 0, r) for r in range(plan.replicates)]
    rows = []
    if plan.workers > 1:
        with ProcessPoolExecutor(plan.workers) as ex:
            for out in ex.map(_task, tasks):
                rows.extend(out)
    else:
        for k, t in enumerate(tasks):
            rows.extend(_task(t))
            if progress:
                progress(k + 1, len(tasks))
    order = {s: k for k, s in enumerate(plan.strategies)}
    rows.sort(key=lambda r: (float(r["sweep_value"]), order[r["strategy"]], r["replicate"]))
    return rows


def _ranks(a):
    a = np.asarray(a, dtype=float)
    idx = np.argsort(a, kind="stable")
    r = np.empty(len(a))
    r[idx] = np.arange(len(a))
    for v in np.unique(a):  # average ties
        m = a == v
        r[m] = r[m].mean()
    return r


def spearman(a, b) -> float:
    ra, rb = _ranks(a), _ranks(b)
    if ra.std() == 0 or rb.std() == 0:
        return float("nan")
    return float(np.corrcoef(ra, rb)[0, 1])


def summarize(plan: ExperimentPlan, rows: list) -> dict:
    out = {"plan": plan.to_json(), "points": []}
    groups = {}
    for r in rows:
        groups.setdefault((float(r["sweep_value"]), r["strategy"]), []).append(r)
    for (v, s), rs in sorted(groups.items(), key=lambda kv: kv[0]):
        cost = np.array([r["total_reward"] for r in rs])
        conv = np.array([r["converted"] for r in rs], dtype=float)
        k = len(rs)
        se = (lambda a: float(a.std(ddof=1) / np.sqrt(k)) if k > 1 else 0.0)
        out["points"].append({"sweep_value": v, "strategy": s, "replicates": k,
                              "mean_total_reward": float(cost.mean()), "stderr_total_reward": se(cost),
                              "mean_converted": float(conv.mean()), "stderr_converted": se(conv)})
    trend = {}
    for s in plan.strategies:
        rs = [r for r in rows if r["strategy"] == s]
        if plan.sweep == "size":
            trend[s] = spearman([r["sweep_value"] for r in rs], [r["total_reward"] for r in rs])
        else:
            trend[s] = spearman([r["sweep_value"] for r in rs], [r["converted"] for r in rs])
    out["spearman"] = trend
    return out


def write_results(plan: ExperimentPlan, rows: list, summary: dict | None = None) -> tuple:
    d = plan.out_dir()
    os.makedirs(d, exist_ok=True)
    csv_path = os.path.join(d, f"{plan.name}.csv")
    with open(csv_path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=RESULT_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    summary = summary or summarize(plan, rows)
    json_path = os.path.join(d, f"{plan.name}.summary.json")
    with open(json_path, "w") as fh:
        json.dump(summary, fh, indent=1)
    return csv_path, json_path


def cmd_experiment(plan: ExperimentPlan, progress=None):
    rows = run_plan(plan, progress)
    summary = summarize(plan, rows)
    paths = write_results(plan, rows, summary)
    return rows, summary, paths
