"""Pairwise network games: utilities, update rules, tie breakers, payoff predicates."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import ChoiceAlphabet, Population

TOL = 1e-9
RULES = ("best-response", "imitation", "rational-imitation")
_RULE_ALIASES = {"br": "best-response", "im": "imitation", "ri": "rational-imitation",
                 "best_response": "best-response", "rational_imitation": "rational-imitation"}


def rule_name(rule: str) -> str:
    r = _RULE_ALIASES.get(rule.lower(), rule.lower())
    if r not in RULES:
        raise ValueError(f"unknown update rule {rule!r}")
    return r


class Network:
    """Undirected simple graph on ``0..n-1``."""

    def __init__(self, n: int, edges=()):
        if n < 1:
            raise ValueError("network needs at least one node")
        nbrs = [set() for _ in range(n)]
        for a, b in edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError(f"self-loop at node {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a}, {b}) outside 0..{n - 1}")
            nbrs[a].add(b)
            nbrs[b].add(a)
        self.n = n
        self.neighbors = tuple(tuple(sorted(s)) for s in nbrs)
        self.closed = tuple(tuple(sorted(s | {i})) for i, s in enumerate(nbrs))

    @property
    def edges(self) -> list:
        return [(i, j) for i in range(self.n) for j in self.neighbors[i] if i < j]

    def degree(self, i: int) -> int:
        return len(self.neighbors[i])

    def degrees(self) -> np.ndarray:
        return np.array([len(s) for s in self.neighbors])

    def isolated(self) -> list:
        return [i for i in range(self.n) if not self.neighbors[i]]

    def two_hop(self, i: int) -> tuple:
        out = set()
        for j in self.closed[i]:
            out.update(self.closed[j])
        return tuple(sorted(out))

    def __eq__(self, other):
        return isinstance(other, Network) and self.n == other.n and self.neighbors == other.neighbors

    def __repr__(self):
        return f"Network(n={self.n}, edges={len(self.edges)})"

    @classmethod
    def star(cls, leaves: int):
        return cls(leaves + 1, [(0, j) for j in range(1, leaves + 1)])

    @classmethod
    def path(cls, n: int):
        return cls(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def complete(cls, n: int):
        return cls(n, [(i, j) for i in range(n) for j in range(i + 1, n)])

    def to_edge_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["source", "target"])
            w.writerows(self.edges)

    @classmethod
    def from_edge_csv(cls, path, n: int | None = None):
        edges = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    edges.append((int(row[0]), int(row[1])))
                except ValueError:
                    continue  # header
        if n is None:
            n = 1 + max((max(e) for e in edges), default=0)
        return cls(n, edges)


# ---------------------------------------------------------------------------
# payoff quantities and predicates (binary: index 0 is strategy 1, index 1 is strategy 2)


def as_matrix(pi) -> np.ndarray:
    m = np.asarray(pi, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"payoff matrix must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("payoff matrix has non-finite entries")
    return m


def gamma(pi) -> float:
    m = as_matrix(pi)
    return float(m[1, 1] - m[0, 1])


def delta(pi) -> float:
    m = as_matrix(pi)
    return float(m[0, 0] - m[1, 0] - m[0, 1] + m[1, 1])


def threshold(pi, degree: int) -> int:
    """Least number of 1-playing neighbours at which 1 is a best response."""
    return math.ceil(gamma(pi) / delta(pi) * degree - TOL)


def is_coordinating_br(pi) -> bool:
    m = as_matrix(pi)
    if m.shape != (2, 2):
        raise ValueError("coordinating best-response predicate is binary only")
    return delta(m) > TOL


def is_coordinating_br_strict(pi) -> bool:
    """Both diagonal entries beat the off-diagonal entry in their column."""
    m = as_matrix(pi)
    return bool(m[0, 0] > m[1, 0] and m[1, 1] > m[0, 1])


def is_opponent_coordinating(pi) -> bool:
    m = as_matrix(pi)
    return bool(np.all(np.diag(m)[:, None] >= m - TOL))


def is_coordination_matrix(pi) -> bool:
    m = as_matrix(pi)
    d = np.diag(m)
    return bool(np.all(d[:, None] >= m - TOL) and np.all(d[None, :] >= m - TOL))


# ---------------------------------------------------------------------------
# tie breakers


@dataclass(frozen=True)
class TieBreaker:
    """Picks one choice out of a nonempty feasible set.

    kinds: ``min`` (alphabet-first), ``current`` (keep x_i if feasible, else
    alphabet-first), ``designated`` (copy a fixed agent's choice if feasible,
    else alphabet-first) and ``opposite`` (binary: the opposite of a fixed
    agent's choice if feasible; not coordinating, kept for the checker).
    """

    kind: str = "current"
    agent: int | None = None

    def __post_init__(self):
        if self.kind not in ("min", "current", "designated", "opposite"):
            raise ValueError(f"unknown tie breaker {self.kind!r}")
        if self.kind in ("designated", "opposite") and self.agent is None:
            raise ValueError(f"{self.kind} tie breaker needs an agent")

    def __call__(self, S, x, i) -> int:
        if len(S) == 1:
            return next(iter(S))
        if self.kind == "current" and x[i] in S:
            return x[i]
        if self.kind == "designated" and x[self.agent] in S:
            return x[self.agent]
        if self.kind == "opposite":
            o = 1 - x[self.agent]
            if o in S:
                return o
        return min(S)

    def to_json(self):
        return self.kind if self.agent is None else {"kind": self.kind, "agent": self.agent}

    @classmethod
    def from_json(cls, d):
        if d is None:
            return cls()
        if isinstance(d, str):
            return cls(d)
        return cls(d["kind"], d.get("agent"))


# ---------------------------------------------------------------------------
# the game


class RuleGame:
    """Update rules and protocol plumbing shared by every utility-based game.

    Subclasses provide ``network``, ``alphabet``, ``rules``, ``tiebreakers``
    and ``utility(x, i, own=None)``.
    """

    @property
    def n(self):
        return self.network.n

    @property
    def k(self):
        return len(self.alphabet)

    @property
    def binary(self):
        return self.k == 2

    def utilities(self, x) -> np.ndarray:
        return np.array([self.utility(x, i) for i in range(self.n)])

    def isolated(self) -> list:
        return self.network.isolated()

    # feasible sets ---------------------------------------------------------

    def best_response_set(self, x, i: int) -> frozenset:
        us = [self.utility(x, i, q) for q in range(self.k)]
        top = max(us)
        return frozenset(q for q, u in enumerate(us) if u >= top - TOL)

    def imitation_set(self, x, i: int) -> frozenset:
        hood = self.network.closed[i]
        us = [self.utility(x, j) for j in hood]
        top = max(us)
        return frozenset(x[j] for j, u in zip(hood, us) if u >= top - TOL)

    def better_reply_set(self, x, i: int) -> frozenset:
        cur = self.utility(x, i)
        return frozenset(q for q in range(self.k) if q != x[i] and self.utility(x, i, q) > cur + TOL)

    def rational_imitation_set(self, x, i: int) -> frozenset:
        s = self.imitation_set(x, i) & self.better_reply_set(x, i)
        return s if s else frozenset([x[i]])

    def feasible_set(self, x, i: int) -> frozenset:
        r = self.rules[i]
        if r == "best-response":
            return self.best_response_set(x, i)
        if r == "imitation":
            return self.imitation_set(x, i)
        return self.rational_imitation_set(x, i)

    def resolve(self, x, i: int) -> int:
        return self.tiebreakers[i](self.feasible_set(x, i), x, i)

    # population ----------------------------------------------------------

    def reads(self, i: int) -> tuple:
        """Agents whose choices agent i's protocol depends on."""
        net = self.network
        reads = set(net.closed[i]) if self.rules[i] == "best-response" else set(net.two_hop(i))
        tb = self.tiebreakers[i]
        if getattr(tb, "agent", None) is not None:
            reads.add(tb.agent)
        return tuple(sorted(reads))

    def dependents(self) -> list:
        if getattr(self, "_deps", None) is None:
            deps = [set() for _ in range(self.n)]
            for i in range(self.n):
                for k in self.reads(i):
                    deps[k].add(i)
            self._deps = tuple(tuple(sorted(d | {k})) for k, d in enumerate(deps))
        return self._deps

    def population(self) -> Population:
        if self._pop is None:
            protos = [_Resolver(self, i) for i in range(self.n)]
            self._pop = Population(self.alphabet, protos, dependents=self.dependents(), name=self.name,
                                   normalized=True)
        return self._pop


class NetworkGame(RuleGame):
    """Network, per-agent payoff matrices, update rules and tie breakers.

    ``bonus[i]`` is added to agent i's utility whenever she plays ``target``;
    it carries utility-additive incentives.  Payoff-row incentives are folded
    into the matrices instead (see :mod:`coordpop.control`).
    """

    def __init__(self, network: Network, payoffs, rules="best-response", tiebreakers=None,
                 alphabet=None, bonus=None, target: int = 0, name: str = ""):
        n = network.n
        arr = np.asarray(payoffs, dtype=float)
        if arr.ndim == 2:
            arr = np.broadcast_to(arr, (n,) + arr.shape)
        self.payoffs = tuple(as_matrix(p) for p in arr)
        if len(self.payoffs) != n:
            raise ValueError(f"need {n} payoff matrices, got {len(self.payoffs)}")
        k = self.payoffs[0].shape[0]
        if any(p.shape != (k, k) for p in self.payoffs):
            raise ValueError("payoff matrices have inconsistent sizes")
        if isinstance(rules, str):
            rules = [rules] * n
        self.rules = tuple(rule_name(r) for r in rules)
        if len(self.rules) != n:
            raise ValueError("need one rule per agent")
        if tiebreakers is None or isinstance(tiebreakers, TieBreaker):
            tiebreakers = [tiebreakers or TieBreaker()] * n
        self.tiebreakers = tuple(tiebreakers)
        if alphabet is None:
            alphabet = tuple(str(a + 1) for a in range(k))
        if not isinstance(alphabet, ChoiceAlphabet):
            alphabet = ChoiceAlphabet(tuple(alphabet))
        if len(alphabet) != k:
            raise ValueError("alphabet size does not match payoff matrices")
        self.alphabet = alphabet
        self.network = network
        self.bonus = np.zeros(n) if bonus is None else np.asarray(bonus, dtype=float).copy()
        if np.any(self.bonus < 0):
            raise ValueError("incentives must be nonnegative")
        self.target = target
        self.name = name
        self._pop = None
        # plain lists are much faster than numpy scalars in the inner loops
        self._rows = [p.tolist() for p in self.payoffs]
        self._bonus = self.bonus.tolist()

    def replace(self, **kw) -> "NetworkGame":
        args = dict(network=self.network, payoffs=self.payoffs, rules=self.rules, tiebreakers=self.tiebreakers,
                    alphabet=self.alphabet, bonus=self.bonus, target=self.target, name=self.name)
        args.update(kw)
        return NetworkGame(**args)

    # utilities -----------------------------------------------------------

    def utility(self, x, i: int, own: int | None = None) -> float:
        """u_i with agent i's choice optionally replaced by ``own``."""
        xi = x[i] if own is None else own
        row = self._rows[i][xi]
        u = 0.0
        for j in self.network.neighbors[i]:
            u += row[x[j]]
        if xi == self.target:
            u += self._bonus[i]
        return u

    # io ------------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "nodes": self.n,
            "edges": [list(e) for e in self.network.edges],
            "alphabet": list(self.alphabet.labels),
            "target": self.alphabet.labels[self.target],
            "agents": [
                {"rule": r, "tiebreaker": tb.to_json(), "payoff": p.tolist(), "bonus": float(b)}
                for r, tb, p, b in zip(self.rules, self.tiebreakers, self.payoffs, self.bonus)
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "NetworkGame":
        n = doc["nodes"] if isinstance(doc["nodes"], int) else len(doc["nodes"])
        net = Network(n, doc.get("edges", []))
        alphabet = ChoiceAlphabet(tuple(doc["alphabet"])) if "alphabet" in doc else None
        agents = doc.get("agents")
        if agents is None:
            agents = [{}] * n
        default = {k: doc[k] for k in ("rule", "tiebreaker", "payoff") if k in doc}
        agents = [{**default, **a} for a in agents]
        payoffs = [a["payoff"] for a in agents]
        rules = [a.get("rule", "best-response") for a in agents]
        tbs = [TieBreaker.from_json(a.get("tiebreaker")) for a in agents]
        bonus = [a.get("bonus", 0.0) for a in agents]
        target = 0
        if "target" in doc and alphabet is not None:
            target = alphabet.index(doc["target"])
        return cls(net, payoffs, rules, tbs, alphabet=alphabet, bonus=bonus, target=target, name=doc.get("name", ""))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(json.load(fh))


class _Resolver:
    __slots__ = ("game", "i")

    def __init__(self, game, i):
        self.game, self.i = game, i

    def __call__(self, x):
        return self.game.resolve(x, self.i)


def n_playing(x, agents: Sequence[int], choice: int) -> int:
    return sum(1 for j in agents if x[j] == choice)
