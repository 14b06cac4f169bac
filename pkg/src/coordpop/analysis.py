"""Exhaustive (or sampled) checks of the coordination properties.

All checkers enumerate ordered state pairs ``(y, z)`` in lexicographic order, so
the first counterexample reported is reproducible.  Protocol values are
tabulated once per agent; the pair conditions are then evaluated with numpy on
blocks of ``y`` rows.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import Population

DEFAULT_MAX_PAIRS = 2 ** 24
_BLOCK_CELLS = 2 ** 22
_TOL = 1e-9


class BudgetExceeded(RuntimeError):
    """The pair space is larger than the configured enumeration budget."""


def kset(z: Sequence[int], y: Sequence[int]) -> frozenset:
    """Choices some agent picks at ``z`` but not at ``y``."""
    if len(z) != len(y):
        raise ValueError("states must have equal length")
    return frozenset(a for a, b in zip(z, y) if a != b)


@dataclass
class PropertyVerdict:
    prop: str
    holds: bool
    states_checked: int
    witness: dict | None = None
    mode: str = "exhaustive"
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds

    def summary(self, alphabet=None) -> str:
        if self.holds:
            if self.mode == "sampled":
                return f"{self.prop}: sampled, no counterexample found in {self.states_checked} pairs"
            return f"{self.prop}: holds ({self.states_checked} pairs checked)"
        w = self.witness if alphabet is None else self.to_json(alphabet)["witness"]
        return f"{self.prop}: fails, witness {w}"

    def to_json(self, alphabet=None) -> dict:
        w = None
        if self.witness is not None:
            w = dict(self.witness)
            if alphabet is not None:
                for key in ("y", "z"):
                    if key in w:
                        w[key] = list(alphabet.decode(w[key]))
                for key in ("choice", "f_y", "f_z"):
                    if w.get(key) is not None:
                        w[key] = alphabet.labels[w[key]]
                for key in ("subset", "kset"):
                    if w.get(key) is not None:
                        w[key] = [alphabet.labels[c] for c in w[key]]
            for key in ("y", "z", "subset", "kset"):
                if key in w:
                    w[key] = list(w[key])
        return {
            "property": self.prop,
            "holds": self.holds,
            "mode": self.mode,
            "states_checked": self.states_checked,
            "witness": w,
            **self.details,
        }


# ---------------------------------------------------------------------------
# state space


class StateSpace:
    """All of C^n in lexicographic order with per-choice agent bitmasks."""

    def __init__(self, n: int, k: int):
        if n > 62:
            raise BudgetExceeded("bitmask encoding supports at most 62 agents")
        self.n, self.k = n, k
        self.size = k ** n
        self.states = np.array(list(itertools.product(range(k), repeat=n)), dtype=np.int16).reshape(self.size, n)
        weights = (1 << np.arange(n, dtype=np.int64))
        self.masks = np.stack([(self.states == a).astype(np.int64) @ weights for a in range(k)])

    def tuple(self, s: int) -> tuple:
        return tuple(int(c) for c in self.states[s])

    def table(self, fn: Callable[[tuple], float], dtype=np.int16) -> np.ndarray:
        return np.fromiter((fn(tuple(row)) for row in self.states.tolist()), dtype=dtype, count=self.size)

    def with_choice(self, i: int, c: int) -> np.ndarray:
        """Index of each state after setting agent ``i`` to ``c``."""
        place = self.k ** (self.n - 1 - i)
        cur = self.states[:, i].astype(np.int64)
        return np.arange(self.size, dtype=np.int64) + (c - cur) * place

    def blocks(self):
        rows = max(1, _BLOCK_CELLS // self.size)
        for lo in range(0, self.size, rows):
            yield lo, min(self.size, lo + rows)


def _space(pop_or_n, k=None, max_pairs=DEFAULT_MAX_PAIRS, allow_over=False):
    n, k = (pop_or_n.n, pop_or_n.k) if isinstance(pop_or_n, Population) else (pop_or_n, k)
    pairs = (k ** n) ** 2
    if pairs > max_pairs and not allow_over:
        raise BudgetExceeded(f"{pairs} ordered pairs exceed the budget of {max_pairs}")
    return StateSpace(n, k)


def _first(viol: np.ndarray, lo: int):
    hits = np.argwhere(viol)
    if len(hits) == 0:
        return None
    y, z = hits[0]
    return lo + int(y), int(z)


def _coordinating_violation(space: StateSpace, F: np.ndarray):
    """First (y, z) with F[z] not in {F[y]} | K(z, y), or None."""
    for lo, hi in space.blocks():
        fy = F[lo:hi]
        viol = np.zeros((hi - lo, space.size), dtype=bool)
        for a in range(space.k):
            zs = F == a
            if not zs.any():
                continue
            # a in K(z, y) iff some agent picks a at z but not at y
            in_k = (space.masks[a][None, zs] & ~space.masks[a][lo:hi, None]) != 0
            viol[:, zs] = (fy[:, None] != a) & ~in_k
        hit = _first(viol, lo)
        if hit:
            return hit
    return None


def _a_violation(space: StateSpace, F: np.ndarray, a: int):
    """First (y, z) with y_j = a => z_j = a for all j, F[y] = a and F[z] != a."""
    ma = space.masks[a]
    for lo, hi in space.blocks():
        cond = (ma[lo:hi, None] & ~ma[None, :]) == 0
        viol = cond & (F[lo:hi, None] == a) & (F[None, :] != a)
        hit = _first(viol, lo)
        if hit:
            return hit
    return None


def _increasing_violation(space: StateSpace, D: np.ndarray, a: int):
    """First (y, z) satisfying the a-ordering condition with D[z] < D[y]."""
    ma = space.masks[a]
    for lo, hi in space.blocks():
        cond = (ma[lo:hi, None] & ~ma[None, :]) == 0
        viol = cond & (D[None, :] < D[lo:hi, None] - _TOL)
        hit = _first(viol, lo)
        if hit:
            return hit
    return None


def _sample_pairs(n, k, samples, seed):
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        yield tuple(rng.integers(0, k, n).tolist()), tuple(rng.integers(0, k, n).tolist())


def _sample_pairs_a(n, k, a, samples, seed):
    """Random pairs already satisfying the a-ordering condition."""
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        y = rng.integers(0, k, n)
        z = rng.integers(0, k, n)
        z[y == a] = a
        yield tuple(y.tolist()), tuple(z.tolist())


# ---------------------------------------------------------------------------
# direct definitions (used for sampling and witness replay)


def coordinating_pair_violated(pop: Population, i: int, y, z) -> bool:
    fz = pop.tend(z, i)
    return fz != pop.tend(y, i) and fz not in kset(z, y)


def ordered(y, z, a) -> bool:
    return all(zj == a for yj, zj in zip(y, z) if yj == a)


def a_pair_violated(pop: Population, i: int, a: int, y, z) -> bool:
    return ordered(y, z, a) and pop.tend(y, i) == a and pop.tend(z, i) != a


def _set(x, i, c):
    x = list(x)
    x[i] = c
    return tuple(x)


# ---------------------------------------------------------------------------
# checkers


def check_coordinating_agent(pop: Population, i: int, max_pairs=DEFAULT_MAX_PAIRS,
                             sample: int | None = None, seed: int = 0) -> PropertyVerdict:
    n, k = pop.n, pop.k
    if (k ** n) ** 2 > max_pairs:
        if not sample:
            raise BudgetExceeded(f"{(k ** n) ** 2} pairs exceed budget {max_pairs}; use sampling")
        for y, z in _sample_pairs(n, k, sample, seed):
            if coordinating_pair_violated(pop, i, y, z):
                return PropertyVerdict("coordinating", False, sample, _coord_witness(pop, i, y, z), "sampled")
        return PropertyVerdict("coordinating", True, sample, mode="sampled")
    space = _space(pop, max_pairs=max_pairs)
    F = space.table(lambda x: pop.tend(x, i))
    hit = _coordinating_violation(space, F)
    if hit is None:
        return PropertyVerdict("coordinating", True, space.size ** 2)
    y, z = (space.tuple(s) for s in hit)
    return PropertyVerdict("coordinating", False, space.size ** 2, _coord_witness(pop, i, y, z))


def _coord_witness(pop, i, y, z):
    return {"agent": i, "y": y, "z": z, "f_y": pop.tend(y, i), "f_z": pop.tend(z, i),
            "kset": sorted(kset(z, y))}


def check_coordinating(pop: Population, **kw) -> PropertyVerdict:
    total = 0
    for i in range(pop.n):
        v = check_coordinating_agent(pop, i, **kw)
        total += v.states_checked
        if not v.holds:
            v.states_checked = total
            return v
    return PropertyVerdict("coordinating", True, total, mode=v.mode)


def check_A_coordinating_agent(pop: Population, i: int, a: int, max_pairs=DEFAULT_MAX_PAIRS,
                               sample: int | None = None, seed: int = 0) -> PropertyVerdict:
    n, k = pop.n, pop.k
    name = f"{pop.alphabet.labels[a]}-coordinating"
    if (k ** n) ** 2 > max_pairs:
        if not sample:
            raise BudgetExceeded(f"{(k ** n) ** 2} pairs exceed budget {max_pairs}; use sampling")
        for y, z in _sample_pairs_a(n, k, a, sample, seed):
            if a_pair_violated(pop, i, a, y, z):
                return PropertyVerdict(name, False, sample, _a_witness(pop, i, a, y, z), "sampled")
        return PropertyVerdict(name, True, sample, mode="sampled")
    space = _space(pop, max_pairs=max_pairs)
    F = space.table(lambda x: pop.tend(x, i))
    hit = _a_violation(space, F, a)
    if hit is None:
        return PropertyVerdict(name, True, space.size ** 2)
    y, z = (space.tuple(s) for s in hit)
    return PropertyVerdict(name, False, space.size ** 2, _a_witness(pop, i, a, y, z))


def _a_witness(pop, i, a, y, z):
    return {"agent": i, "choice": a, "y": y, "z": z, "f_y": pop.tend(y, i), "f_z": pop.tend(z, i)}


def check_restrictive_coordinating(pop: Population, max_pairs=DEFAULT_MAX_PAIRS,
                                   sample: int | None = None, seed: int = 0) -> PropertyVerdict:
    n, k = pop.n, pop.k
    total = 0
    if (k ** n) ** 2 > max_pairs:
        for i in range(n):
            for a in range(k):
                v = check_A_coordinating_agent(pop, i, a, max_pairs, sample, seed)
                total += v.states_checked
                if not v.holds:
                    v.prop, v.states_checked = "restrictive-coordinating", total
                    return v
        return PropertyVerdict("restrictive-coordinating", True, total, mode="sampled")
    space = _space(pop, max_pairs=max_pairs)
    for i in range(n):
        F = space.table(lambda x: pop.tend(x, i))
        for a in range(k):
            total += space.size ** 2
            hit = _a_violation(space, F, a)
            if hit is not None:
                y, z = (space.tuple(s) for s in hit)
                return PropertyVerdict("restrictive-coordinating", False, total, _a_witness(pop, i, a, y, z))
    return PropertyVerdict("restrictive-coordinating", True, total)


def check_coordinating_tiebreaker(tb, pop: Population, i: int = 0, max_pairs=DEFAULT_MAX_PAIRS) -> PropertyVerdict:
    """``tb(S, x, i)`` must satisfy tb(S, z) in {tb(S, y)} | K(z, y) for all S and pairs."""
    space = _space(pop, max_pairs=max_pairs)
    total = 0
    for size in range(1, pop.k + 1):
        for subset in itertools.combinations(range(pop.k), size):
            S = frozenset(subset)
            T = space.table(lambda x: tb(S, x, i))
            if not np.all(np.isin(T, subset)):
                bad = int(np.argmax(~np.isin(T, subset)))
                return PropertyVerdict("coordinating-tiebreaker", False, total,
                                       {"agent": i, "subset": subset, "y": space.tuple(bad), "z": space.tuple(bad),
                                        "reason": "choice outside the feasible set"})
            total += space.size ** 2
            hit = _coordinating_violation(space, T)
            if hit is not None:
                y, z = (space.tuple(s) for s in hit)
                return PropertyVerdict("coordinating-tiebreaker", False, total,
                                       {"agent": i, "subset": subset, "y": y, "z": z,
                                        "f_y": tb(S, y, i), "f_z": tb(S, z, i), "kset": sorted(kset(z, y))})
    return PropertyVerdict("coordinating-tiebreaker", True, total)


def check_supermodular_utility(utility: Callable[[tuple], float], n: int, i: int, high: int = 0, low: int = 1,
                               k: int = 2, max_pairs=DEFAULT_MAX_PAIRS) -> PropertyVerdict:
    """Increasing differences of ``utility`` for agent ``i`` with ``high`` above ``low``.

    ``utility(x)`` is agent i's utility at state x (choice indices).
    """
    if k != 2:
        raise ValueError("supermodularity is checked on binary alphabets only")
    space = _space(n, k, max_pairs=max_pairs)
    U = space.table(utility, dtype=float)
    D = U[space.with_choice(i, high)] - U[space.with_choice(i, low)]
    hit = _increasing_violation(space, D, high)
    if hit is None:
        return PropertyVerdict("supermodular", True, space.size ** 2)
    y, z = (space.tuple(s) for s in hit)
    return PropertyVerdict("supermodular", False, space.size ** 2,
                           {"agent": i, "y": y, "z": z, "diff_y": float(D[hit[0]]), "diff_z": float(D[hit[1]])})


def check_satisfaction_supermodular(pop: Population, i: int, high: int = 0, low: int = 1,
                                    max_pairs=DEFAULT_MAX_PAIRS) -> PropertyVerdict:
    if pop.k != 2:
        raise ValueError("satisfaction supermodularity is checked on binary alphabets only")
    space = _space(pop, max_pairs=max_pairs)
    F = space.table(lambda x: pop.tend(x, i))
    sat = (F == space.states[:, i]).astype(float)
    D = sat[space.with_choice(i, high)] - sat[space.with_choice(i, low)]
    hit = _increasing_violation(space, D, high)
    if hit is None:
        return PropertyVerdict("satisfaction-supermodular", True, space.size ** 2)
    y, z = (space.tuple(s) for s in hit)
    return PropertyVerdict("satisfaction-supermodular", False, space.size ** 2,
                           {"agent": i, "y": y, "z": z, "diff_y": float(D[hit[0]]), "diff_z": float(D[hit[1]])})


def satisfaction(pop: Population, x, i) -> int:
    return int(pop.tend(x, i) == x[i])


def replay_witness(verdict: PropertyVerdict, pop: Population = None, tb=None, utility=None) -> bool:
    """Re-evaluate a failing verdict's witness against the plain definition."""
    w = verdict.witness
    if w is None:
        return False
    y, z, i = tuple(w["y"]), tuple(w["z"]), w["agent"]
    p = verdict.prop
    if p == "coordinating":
        return coordinating_pair_violated(pop, i, y, z)
    if p == "coordinating-tiebreaker":
        S = frozenset(w["subset"])
        t_z = tb(S, z, i)
        return t_z not in S or (t_z != tb(S, y, i) and t_z not in kset(z, y))
    if p.endswith("-coordinating"):
        return a_pair_violated(pop, i, w["choice"], y, z)
    if p in ("supermodular", "satisfaction-supermodular"):
        f = utility if p == "supermodular" else (lambda x: satisfaction(pop, x, i))
        hi, lo = 0, 1
        if not ordered(y, z, hi):
            return False
        dz = f(_set(z, i, hi)) - f(_set(z, i, lo))
        dy = f(_set(y, i, hi)) - f(_set(y, i, lo))
        return dz < dy - _TOL
    raise ValueError(f"cannot replay property {p!r}")
