"""Incentive control of binary network games.

Rewards push agents towards a target choice ``X`` (index ``game.target``,
default 0).  Two semantics are supported per agent:

* ``payoff-row``: r_i is added to the whole row X of agent i's payoff matrix, so
  her utility rises by ``r_i * |N_i|`` whenever she plays X;
* ``additive``: r_i is added once to u_i whenever she plays X.

``auto`` (the default) uses payoff-row for best-responders and additive for
imitators and rational imitators.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import time
from dataclasses import dataclass, field

import numpy as np

from .analysis import BudgetExceeded, PropertyVerdict
from .core import ActivationSequence, equilibrate, is_equilibrium, run
from .netgames import TOL, NetworkGame, RuleGame

EPSILON = 1e-6
BETA = 4.0
IMITATOR_ENUM_BITS = 16
OPTIMAL_MAX_N = 15
STRATEGIES = ("inro", "ipro-br", "ipro-im", "degree", "random", "optimal")


class NotEquilibrium(ValueError):
    pass


@dataclass
class RewardVector:
    r: np.ndarray
    target: int = 0

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float).copy()
        if np.any(self.r < 0):
            raise ValueError("rewards must be nonnegative")

    @classmethod
    def zeros(cls, n, target=0):
        return cls(np.zeros(n), target)

    @classmethod
    def uniform(cls, n, value, target=0):
        return cls(np.full(n, float(value)), target)

    @property
    def total(self) -> float:
        return float(self.r.sum())

    def to_json(self):
        return {"target": self.target, "r": self.r.tolist()}


def semantics_for(game, i: int, semantics: str = "auto") -> str:
    if semantics == "auto":
        return "payoff-row" if game.rules[i] == "best-response" else "additive"
    if semantics not in ("payoff-row", "additive"):
        raise ValueError(f"unknown incentive semantics {semantics!r}")
    return semantics


def reward_weight(game, i: int, semantics: str = "auto") -> float:
    """Utility gained per unit of reward when agent i plays the target."""
    if semantics_for(game, i, semantics) == "payoff-row":
        d = game.network.degree(i)
        if d == 0:
            raise ValueError(f"agent {i} is isolated; payoff-row rewards have no effect")
        return float(d)
    return 1.0


class IncentiveGame(RuleGame):
    """A view of ``base`` with rewards added; shares the base game's structure."""

    def __init__(self, base: NetworkGame, rewards, semantics: str = "auto"):
        self.base = base
        self.network, self.alphabet = base.network, base.alphabet
        self.rules, self.tiebreakers = base.rules, base.tiebreakers
        self.target, self.name = base.target, base.name
        self.semantics = semantics
        r = rewards.r if isinstance(rewards, RewardVector) else np.asarray(rewards, dtype=float)
        if np.any(r < 0):
            raise ValueError("rewards must be nonnegative")
        self.rewards = r.copy()
        # an isolated payoff-row agent gains nothing, exactly as in materialize()
        w = [0.0 if r[i] <= 0 or (semantics_for(base, i, semantics) == "payoff-row"
                                  and base.network.degree(i) == 0)
             else reward_weight(base, i, semantics) for i in range(base.n)]
        self._boost = (self.rewards * np.asarray(w)).tolist()
        self._deps = base.dependents()
        self._rows, self._bonus, self._nbrs = base._rows, base._bonus, base.network.neighbors
        self._pop = None

    def utility(self, x, i, own=None):
        # same sum as the base game, inlined because it dominates run time
        xi = x[i] if own is None else own
        row = self._rows[i][xi]
        u = 0.0
        for j in self._nbrs[i]:
            u += row[x[j]]
        if xi == self.target:
            u += self._bonus[i] + self._boost[i]
        return u

    def materialize(self) -> NetworkGame:
        pay = [p.copy() for p in self.base.payoffs]
        bonus = self.base.bonus.copy()
        X = self.target
        for i, ri in enumerate(self.rewards):
            if ri <= 0:
                continue
            if semantics_for(self.base, i, self.semantics) == "payoff-row":
                pay[i][X, :] += ri
            else:
                bonus[i] += ri
        return self.base.replace(payoffs=pay, bonus=bonus)


def apply_incentive(game: NetworkGame, r, semantics: str = "auto") -> NetworkGame:
    """Return a new game with the rewards folded into matrices / bonuses."""
    if isinstance(r, RewardVector) and r.target != game.target:
        game = game.replace(target=r.target)
    return IncentiveGame(game, r, semantics).materialize()


def _view(game, rewards, semantics):
    if isinstance(game, IncentiveGame):
        raise TypeError("pass the base game and the full reward vector")
    return IncentiveGame(game, rewards, semantics)


# ---------------------------------------------------------------------------
# closed-form infimum rewards


def min_reward_br(game, x, i, semantics: str = "auto", rewards=None) -> float:
    """Least extra reward above which i's best response is strictly the target.

    With payoff-row rewards and no earlier rewards this is
    gamma - delta * n1 / |N_i| clamped at 0.  Returns 0 for agents already at X.
    """
    X = game.target
    if x[i] == X:
        return 0.0
    g = game if rewards is None else _view(game, rewards, semantics)
    gap = g.utility(x, i, 1 - X) - g.utility(x, i, X)
    return max(0.0, gap / reward_weight(game, i, semantics))


def br_switch_reward(pi, n1: int, degree: int) -> float:
    from .netgames import delta, gamma
    return max(0.0, gamma(pi) - delta(pi) * n1 / degree)


def _imitator_targets(game, x, i):
    """2-playing imitator neighbours of i."""
    other = 1 - game.target
    return [j for j in game.network.neighbors[i] if x[j] == other and game.rules[j] == "imitation"]


def min_reward_imitation(game, x, i, semantics: str = "auto", rewards=None) -> float:
    """Least extra reward to 1-playing i after which some 2-playing imitator
    neighbour j strictly prefers copying her (minimised over j)."""
    X = game.target
    if x[i] != X:
        raise ValueError(f"agent {i} does not play the target choice")
    js = _imitator_targets(game, x, i)
    if not js:
        raise ValueError(f"agent {i} has no 2-playing imitator neighbour")
    g = game if rewards is None else _view(game, rewards, semantics)
    ui = g.utility(x, i)
    best = None
    for j in js:
        m2 = max(g.utility(x, k) for k in game.network.closed[j] if x[k] != X)
        gap = m2 - ui
        best = gap if best is None else min(best, gap)
    return max(0.0, best / reward_weight(game, i, semantics))


def min_reward(game, x, i, semantics="auto", rewards=None) -> float:
    """Reward for a 2-playing best-responder to switch, or for a target player
    to become the model of a 2-playing imitator neighbour."""
    if x[i] != game.target and game.rules[i] == "best-response":
        return min_reward_br(game, x, i, semantics, rewards)
    return min_reward_imitation(game, x, i, semantics, rewards)


# ---------------------------------------------------------------------------
# simulation under incentives


def simulate(game, x, rewards, semantics="auto", dirty=None):
    """Equilibrate the incentivised game from x with round-robin sweeps."""
    g = _view(game, rewards, semantics)
    n = game.n
    final, switches, sweeps = equilibrate(g.population(), x, dirty=dirty, max_sweeps=n + 2)
    return final, switches, sweeps


def _touch(game, i):
    return game.network.closed[i]


# ---------------------------------------------------------------------------
# candidate reward sets and uniform control


def _br_candidates(game, xs, i, semantics):
    X = game.target
    nb = game.network.neighbors[i]
    w = reward_weight(game, i, semantics)
    out = set()
    other = 1 - X
    movable = [j for j in nb if xs[j] != X]
    for extra in range(len(movable) + 1):
        # a best-responder only sees how many neighbours play X
        y = list(xs)
        for j in movable[:extra]:
            y[j] = X
        gap = game.utility(y, i, other) - game.utility(y, i, X)
        out.add(max(0.0, gap / w))
    return out


def _local_states(game, xs, i, radius_agents):
    X = game.target
    free = [j for j in radius_agents if j != i and xs[j] != X]
    if len(free) > IMITATOR_ENUM_BITS:
        raise BudgetExceeded(f"agent {i}: {len(free)} free neighbours exceed the enumeration budget")
    base = list(xs)
    for bits in itertools.product((0, 1), repeat=len(free)):
        y = list(base)
        for j, b in zip(free, bits):
            if b:
                y[j] = X
        yield y


def _imitation_inf(game, y, i, semantics):
    """Least uniform reward making X the unique imitation choice of i, or None."""
    X = game.target
    hood = game.network.closed[i]
    two = [game.utility(y, k) for k in hood if y[k] != X]
    ones = [k for k in hood if y[k] == X]
    if not ones:
        return None
    if not two:
        return 0.0
    m2 = max(two)
    return max(0.0, min((m2 - game.utility(y, k)) / reward_weight(game, k, semantics) for k in ones))


def candidate_reward_set(game, xs, i, semantics="auto") -> list:
    """Sorted distinct infimum rewards over the states reachable from xs.

    Reachable states keep agent i at xs_i and let every other agent be either at
    xs_j or at the target.
    """
    X = game.target
    if xs[i] == X:
        return [0.0]
    rule = game.rules[i]
    vals = set()
    if rule == "best-response":
        vals = _br_candidates(game, xs, i, semantics)
    else:
        net = game.network
        ball = net.two_hop(i)
        for y in _local_states(game, xs, i, ball):
            v = _imitation_inf(game, y, i, semantics)
            if v is None:
                continue
            if rule == "rational-imitation":
                gap = game.utility(y, i, 1 - X) - game.utility(y, i, X)
                v = max(v, max(0.0, gap / reward_weight(game, i, semantics)))
            vals.add(v)
    return _dedupe(vals)


def _dedupe(vals) -> list:
    out = []
    for v in sorted(vals):
        if not out or v - out[-1] > TOL:
            out.append(float(v))
    return out


def all_candidates(game, xs, semantics="auto") -> list:
    vals = set()
    for i in range(game.n):
        vals.update(candidate_reward_set(game, xs, i, semantics))
    return _dedupe(vals)


def converts_all(game, xs, r, semantics="auto") -> bool:
    final, _, _ = simulate(game, xs, np.full(game.n, float(r)), semantics)
    return all(c == game.target for c in final)


@dataclass
class UniformResult:
    reward: float | None
    candidates: list
    probes: list = field(default_factory=list)

    @property
    def solvable(self):
        return self.reward is not None

    def to_json(self):
        return {"reward": self.reward, "solvable": self.solvable, "candidates": self.candidates,
                "probes": self.probes}


def uniform_reward(game, xs, semantics="auto", epsilon=EPSILON, candidates=None) -> UniformResult:
    """Least candidate r such that a uniform reward r + epsilon converts everyone."""
    xs = tuple(xs)
    if not is_equilibrium(game.population(), xs):
        raise NotEquilibrium("the start state is not an equilibrium")
    if all(c == game.target for c in xs):
        return UniformResult(0.0, [0.0])
    cands = all_candidates(game, xs, semantics) if candidates is None else list(candidates)
    probes = []

    def ok(k):
        res = converts_all(game, xs, cands[k] + epsilon, semantics)
        probes.append((cands[k], res))
        return res

    if not cands or not ok(len(cands) - 1):
        return UniformResult(None, cands, probes)
    lo, hi = -1, len(cands) - 1  # ok(hi) holds, lo is a sentinel that fails
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return UniformResult(cands[hi], cands, probes)


# ---------------------------------------------------------------------------
# targeted control


@dataclass
class ControlResult:
    strategy: str
    rewards: np.ndarray
    order: list
    x0: tuple
    final: tuple
    target: int = 0
    epsilon: float = EPSILON
    budget: float | None = None
    residue: list = field(default_factory=list)
    iterations: int = 0
    max_sweeps: int = 0
    wall_ms: float = 0.0
    seed: int | None = None
    instance: str = ""

    @property
    def cost(self) -> float:
        return float(np.sum(self.rewards))

    @property
    def converted(self) -> int:
        return sum(1 for c in self.final if c == self.target)

    @property
    def complete(self) -> bool:
        return self.converted == len(self.final)

    def to_json(self, alphabet=None):
        lab = (lambda c: alphabet.labels[c]) if alphabet else (lambda c: c)
        return {
            "instance": self.instance, "strategy": self.strategy, "epsilon": self.epsilon,
            "budget": self.budget, "seed": self.seed,
            "rewards": self.rewards.tolist(), "total_reward": self.cost,
            "order": [[a, d] for a, d in self.order],
            "x0": [lab(c) for c in self.x0], "final": [lab(c) for c in self.final],
            "converted": self.converted, "residue": self.residue,
            "iterations": self.iterations, "wall_ms": self.wall_ms,
        }

    CSV_FIELDS = ("instance", "n", "strategy", "total_reward", "converted", "wall_ms")

    def csv_row(self) -> dict:
        return {"instance": self.instance, "n": len(self.x0), "strategy": self.strategy,
                "total_reward": self.cost, "converted": self.converted, "wall_ms": round(self.wall_ms, 3)}

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerow(self.csv_row())
        return buf.getvalue()


def eligible(game, x) -> tuple:
    """(2-playing best-responders, target players with a 2-playing imitator neighbour).

    The second set also admits best-responders that already play the target:
    in mixed networks they are often the only possible models for imitators.
    """
    X = game.target
    B = [i for i in range(game.n) if game.rules[i] == "best-response" and x[i] != X]
    I = [i for i in range(game.n) if game.rules[i] != "rational-imitation" and x[i] == X
         and _imitator_targets(game, x, i)]
    return B, I


def potential_br(game, x) -> float:
    from .netgames import threshold
    X = game.target
    tot = 0.0
    for i in range(game.n):
        nb = game.network.neighbors[i]
        n1 = sum(1 for j in nb if x[j] == X)
        tot += n1 - threshold(game.payoffs[i], len(nb)) + (0 if x[i] == X else 1)
    return tot


def potential_im(game, x) -> float:
    X = game.target
    return float(sum(1 for i in range(game.n) for j in game.network.neighbors[i] if x[j] == X))


class _Context:
    """State of one run of the iterative algorithm."""

    def __init__(self, game, x0, semantics, epsilon, beta):
        self.game, self.semantics, self.eps, self.beta = game, semantics, epsilon, beta
        self.x = tuple(x0)
        self.r = np.zeros(game.n)
        self.max_sweeps = 0
        self._cache = {}

    def n_x(self, x=None):
        x = self.x if x is None else x
        return sum(1 for c in x if c == self.game.target)

    def candidates(self):
        B, I = eligible(self.game, self.x)
        return sorted(B + I)

    def cost(self, i) -> float:
        key = ("cost", i)
        if key not in self._cache:
            self._cache[key] = min_reward(self.game, self.x, i, self.semantics, self.r)
        return self._cache[key]

    def lookahead(self, i):
        key = ("look", i)
        if key not in self._cache:
            r = self.r.copy()
            r[i] += self.cost(i) + self.eps
            final, sw, sweeps = simulate(self.game, self.x, r, self.semantics, dirty=_touch(self.game, i))
            self.max_sweeps = max(self.max_sweeps, sweeps)
            self._cache[key] = (final, r)
        return self._cache[key]

    def commit(self, i):
        inc = self.cost(i) + self.eps
        final, r = self.lookahead(i)
        self.x, self.r = final, r
        self._cache = {}
        return inc


def _ratio(gain, cost, beta):
    return gain / cost ** beta


def select_inro(ctx: _Context, cands):
    best, arg = None, None
    x0 = ctx.n_x()
    for j in cands:
        gain = ctx.n_x(ctx.lookahead(j)[0]) - x0
        v = _ratio(gain, ctx.cost(j) + ctx.eps, ctx.beta)
        if best is None or v > best:
            best, arg = v, j
    return arg


def _select_potential(ctx: _Context, cands, phi):
    best, arg = None, None
    p0 = phi(ctx.game, ctx.x)
    for j in cands:
        gain = phi(ctx.game, ctx.lookahead(j)[0]) - p0
        v = _ratio(gain, ctx.cost(j) + ctx.eps, ctx.beta)
        if best is None or v > best:
            best, arg = v, j
    return arg


def select_ipro_br(ctx, cands):
    if any(r != "best-response" for r in ctx.game.rules):
        raise ValueError("the best-response potential is only defined for best-responder networks")
    return _select_potential(ctx, cands, potential_br)


def select_ipro_im(ctx, cands):
    if any(r != "imitation" for r in ctx.game.rules):
        raise ValueError("the imitation potential is only defined for imitator networks")
    return _select_potential(ctx, cands, potential_im)


def select_degree(ctx, cands):
    deg = ctx.game.network.degrees()
    return max(cands, key=lambda j: (deg[j], -j))


class _RandomSelector:
    def __init__(self, seed):
        self.rng = np.random.default_rng(seed)

    def __call__(self, ctx, cands):
        return cands[int(self.rng.integers(len(cands)))]


SELECTORS = {"inro": select_inro, "ipro-br": select_ipro_br, "ipro-im": select_ipro_im, "degree": select_degree}


def _check_start(game, x0):
    if not game.binary:
        raise ValueError("targeted control needs a binary game")
    if not is_equilibrium(game.population(), x0):
        raise NotEquilibrium("the start state is not an equilibrium")


def targeted_control(game: NetworkGame, x0, strategy: str = "inro", epsilon: float = EPSILON,
                     budget: float | None = None, beta: float = BETA, seed: int | None = 0,
                     semantics: str = "auto", order: list | None = None) -> ControlResult:
    """The iterative targeted-reward algorithm with a pluggable selection rule.

    ``order`` replays a fixed list of agents instead of selecting.
    """
    t0 = time.perf_counter()
    x0 = tuple(x0)
    _check_start(game, x0)
    strategy = strategy.lower()
    if strategy == "optimal" and order is None:
        res = optimal_control(game, x0, epsilon=epsilon, semantics=semantics, budget=budget)
        res.wall_ms = 1e3 * (time.perf_counter() - t0)
        return res
    if order is None:
        if strategy == "random":
            select = _RandomSelector(seed)
        elif strategy in SELECTORS:
            select = SELECTORS[strategy]
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
        if strategy == "ipro-br" and any(r != "best-response" for r in game.rules):
            raise ValueError("ipro-br needs a best-responder network")
        if strategy == "ipro-im" and any(r != "imitation" for r in game.rules):
            raise ValueError("ipro-im needs an imitator network")
    ctx = _Context(game, x0, semantics, epsilon, beta)
    log = []
    replay = list(order) if order is not None else None
    X = game.target
    while any(c != X for c in ctx.x):
        if len(log) > game.n:
            raise RuntimeError("more iterations than agents; the population is not monotone")
        cands = ctx.candidates()
        if budget is not None:
            left = budget - ctx.r.sum()
            cands = [j for j in cands if ctx.cost(j) + epsilon <= left + 1e-12]
        if not cands:
            break
        if replay is not None:
            if not replay:
                break
            j = replay.pop(0)
            if j not in cands:
                raise ValueError(f"replayed agent {j} is not eligible")
        else:
            j = select(ctx, cands)
        inc = ctx.commit(j)
        log.append((int(j), float(inc)))
    residue = [i for i, c in enumerate(ctx.x) if c != X]
    return ControlResult(strategy, ctx.r, log, x0, ctx.x, X, epsilon, budget, residue, len(log),
                         ctx.max_sweeps, 1e3 * (time.perf_counter() - t0), seed)


def replay_control(game, result: ControlResult, semantics="auto") -> ControlResult:
    return targeted_control(game, result.x0, result.strategy, result.epsilon, result.budget,
                            semantics=semantics, order=[a for a, _ in result.order])


def _relevant(game):
    """Agents whose reward can still matter once they play the target."""
    out = []
    for i in range(game.n):
        if game.rules[i] != "best-response":
            out.append(i)
        elif any(game.rules[j] != "best-response" for j in game.network.neighbors[i]):
            out.append(i)
    return out


def optimal_control(game, x0, epsilon=EPSILON, semantics="auto", budget=None, max_n=OPTIMAL_MAX_N) -> ControlResult:
    """Exhaustive search over selection orders with branch and bound.

    The incumbent starts from the INRO solution.  A node's cost plus the
    cheapest next increment bounds every completion from below; nodes are
    deduplicated on (state, rewards that can still influence anyone).
    Budgeted runs maximise conversions first, then minimise cost.
    """
    if game.n > max_n:
        raise BudgetExceeded(f"exhaustive search is capped at n={max_n}")
    x0 = tuple(x0)
    _check_start(game, x0)
    X = game.target
    inro = targeted_control(game, x0, "inro", epsilon, budget, semantics=semantics)
    best = {"score": (inro.converted, -inro.cost), "order": [a for a, _ in inro.order]}
    keep = set(_relevant(game))
    seen = {}

    def key(x, r):
        return x, tuple(round(float(r[i]), 9) if (i in keep or x[i] != X) else 0.0 for i in range(game.n))

    def dfs(ctx: _Context, path):
        conv, cost = ctx.n_x(), float(ctx.r.sum())
        cands = ctx.candidates()
        if budget is not None:
            cands = [j for j in cands if ctx.cost(j) + epsilon <= budget - cost + 1e-12]
        if not cands or conv == game.n:
            score = (conv, -cost)
            if score > best["score"]:
                best["score"], best["order"] = score, list(path)
            return
        if budget is None:
            bound = cost + min(ctx.cost(j) for j in cands) + epsilon
            if bound >= -best["score"][1] - 1e-12 and best["score"][0] == game.n:
                return
        k = key(ctx.x, ctx.r)
        if k in seen and seen[k] <= cost + 1e-12:
            return
        seen[k] = cost
        kids = sorted(cands, key=lambda j: (ctx.cost(j), j))
        for j in kids:
            final, r = ctx.lookahead(j)
            child = _Context(game, final, semantics, epsilon, ctx.beta)
            child.r = r
            dfs(child, path + [j])

    dfs(_Context(game, x0, semantics, epsilon, BETA), [])
    res = targeted_control(game, x0, "optimal", epsilon, budget, semantics=semantics, order=best["order"])
    return res


# ---------------------------------------------------------------------------
# property checks under incentives


def verify_monotone_in_X(game, xs, rewards, trials: int = 10, seed: int = 0, semantics="auto",
                         max_steps: int | None = None) -> PropertyVerdict:
    xs = tuple(xs)
    if not is_equilibrium(game.population(), xs):
        raise NotEquilibrium("the start state is not an equilibrium")
    g = _view(game, rewards, semantics)
    pop = g.population()
    X = game.target
    steps = max_steps or 20 * game.n * game.n
    for t in range(trials):
        tr = run(pop, xs, ActivationSequence.uniform(seed + t), max_steps=steps)
        for sw in tr.switches:
            if sw.after != X:
                return PropertyVerdict("monotone-in-X", False, t + 1,
                                       {"trial_seed": seed + t, "t": sw.t, "agent": sw.agent,
                                        "from": sw.before, "to": sw.after})
    return PropertyVerdict("monotone-in-X", True, trials, mode="sampled")


def persistent_sequences(n, count, seed=0):
    """Round-robins with distinct rotations, topped up with seeded random draws."""
    seqs = [ActivationSequence.round_robin(offset=k) for k in range(min(count, n))]
    k = 0
    while len(seqs) < count:
        seqs.append(ActivationSequence.uniform(seed + k))
        k += 1
    return seqs[:count]


def verify_unique_convergence(game, xs, rewards, sequences: int = 10, seed: int = 0, semantics="auto",
                              max_steps: int | None = None) -> PropertyVerdict:
    xs = tuple(xs)
    g = _view(game, rewards, semantics)
    pop = g.population()
    steps = max_steps or 50 * game.n * game.n
    finals = []
    for s in persistent_sequences(game.n, sequences, seed):
        tr = run(pop, xs, s, max_steps=steps)
        if tr.verdict.kind != "equilibrium":
            return PropertyVerdict("unique-convergence", False, len(finals) + 1,
                                   {"sequence": s.to_json(), "verdict": str(tr.verdict)})
        finals.append((s, tr.final))
    ref = finals[0][1]
    for s, f in finals[1:]:
        if f != ref:
            return PropertyVerdict("unique-convergence", False, len(finals),
                                   {"sequence": s.to_json(), "final": list(f), "reference": list(ref)})
    return PropertyVerdict("unique-convergence", True, len(finals), mode="sampled",
                           details={"equilibrium": list(ref)})


def dump_result(result: ControlResult, path, alphabet=None):
    path = str(path)
    with open(path, "w") as fh:
        if path.endswith(".csv"):
            fh.write(result.csv())
        else:
            json.dump(result.to_json(alphabet), fh, indent=1)
