"""Spatial public goods games on a network.

Every agent hosts one game over her closed neighbourhood.  Choices are stored
as indices into the alphabet ("C", "D"); cooperation is index 0 and counts as
contribution 1.
"""
from __future__ import annotations

import json

import numpy as np

from .core import ChoiceAlphabet
from .netgames import TOL, Network, RuleGame, TieBreaker, rule_name

ALPHABET = ChoiceAlphabet(("C", "D"))
C, D = 0, 1


def contributes(c: int) -> int:
    return 1 if c == C else 0


class PublicGoodsGame(RuleGame):
    def __init__(self, network: Network, r: float, c: float = 1.0, rules="best-response",
                 tiebreakers=None, name: str = ""):
        if r <= 0 or c <= 0:
            raise ValueError("multiplier and contribution must be positive")
        n = network.n
        self.network, self.r, self.c, self.name = network, float(r), float(c), name
        self.alphabet = ALPHABET
        if isinstance(rules, str):
            rules = [rules] * n
        self.rules = tuple(rule_name(x) for x in rules)
        if tiebreakers is None or isinstance(tiebreakers, TieBreaker):
            tiebreakers = [tiebreakers or TieBreaker()] * n
        self.tiebreakers = tuple(tiebreakers)
        self._size = [len(s) for s in network.closed]
        self._pop = None

    def utility(self, x, i: int, own: int | None = None) -> float:
        net, rc = self.network, self.r * self.c
        xi = contributes(x[i] if own is None else own)
        u = 0.0
        for j in net.closed[i]:
            pool = sum(contributes(x[k]) for k in net.closed[j] if k != i) + xi
            u += rc * pool / self._size[j]
        return u - self._size[i] * self.c * xi

    def cooperation_gain(self, i: int) -> float:
        """u_i(C) - u_i(D); the same at every state."""
        share = sum(1.0 / self._size[j] for j in self.network.closed[i])
        return self.c * (self.r * share - self._size[i])

    def best_response_set(self, x, i: int) -> frozenset:
        g = self.cooperation_gain(i)
        if g > TOL:
            return frozenset([C])
        if g < -TOL:
            return frozenset([D])
        return frozenset([C, D])

    def brute_best_response_set(self, x, i: int) -> frozenset:
        return RuleGame.best_response_set(self, x, i)

    def square_rule_best_response_set(self, x, i: int) -> frozenset:
        """Cooperate iff r >= |closed neighbourhood|^2 (both at equality)."""
        s2 = self._size[i] ** 2
        if self.r > s2 + TOL:
            return frozenset([C])
        if self.r < s2 - TOL:
            return frozenset([D])
        return frozenset([C, D])

    def reads(self, i: int) -> tuple:
        net = self.network
        hood = set(net.two_hop(i))
        if self.rules[i] != "best-response":
            for j in list(hood):
                hood.update(net.closed[j])
        tb = self.tiebreakers[i]
        if tb.agent is not None:
            hood.add(tb.agent)
        return tuple(sorted(hood))

    def pool_balance(self, x) -> tuple:
        """(r times everything contributed, everything paid out)."""
        net = self.network
        paid_in = sum(contributes(x[k]) * self.c * self._size[k] for k in range(self.n))
        paid_out = sum(self.utility(x, i) + self._size[i] * self.c * contributes(x[i]) for i in range(self.n))
        return self.r * paid_in, paid_out

    def to_json(self) -> dict:
        return {"name": self.name, "nodes": self.n, "edges": [list(e) for e in self.network.edges],
                "r": self.r, "c": self.c, "rules": list(self.rules),
                "tiebreakers": [tb.to_json() for tb in self.tiebreakers]}

    @classmethod
    def from_json(cls, doc: dict) -> "PublicGoodsGame":
        n = doc["nodes"] if isinstance(doc["nodes"], int) else len(doc["nodes"])
        tbs = doc.get("tiebreakers")
        if tbs is not None and not isinstance(tbs, list):
            tbs = TieBreaker.from_json(tbs)
        elif tbs is not None:
            tbs = [TieBreaker.from_json(t) for t in tbs]
        return cls(Network(n, doc.get("edges", [])), doc["r"], doc.get("c", 1.0),
                   doc.get("rules", doc.get("rule", "best-response")), tbs, name=doc.get("name", ""))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)


def pgg_utility(g: PublicGoodsGame, x, i):
    return g.utility(x, i)


def pgg_best_response_set(g: PublicGoodsGame, x, i):
    return g.best_response_set(x, i)


def pgg_imitation_set(g: PublicGoodsGame, x, i):
    return g.imitation_set(x, i)


def pgg_rational_imitation_set(g: PublicGoodsGame, x, i):
    return g.rational_imitation_set(x, i)


def random_pgg(rng: np.random.Generator, n: int, p_edge: float = 0.4, r_max: float = 40.0, rule="best-response"):
    edges = [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p_edge]
    # half-integer multipliers hit the boundary cases now and then
    r = float(rng.integers(1, int(2 * r_max))) / 2
    return PublicGoodsGame(Network(n, edges), r=r, c=float(rng.choice([0.5, 1.0, 2.0])), rules=rule)
