"""Seeded random instances shared by the unit and acceptance tests."""
import numpy as np

from coordpop.netgames import Network, NetworkGame, TieBreaker

RULES = ("best-response", "imitation", "rational-imitation")


def random_edges(rng, n, p=0.5):
    return [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p]


def coordination_matrix(rng):
    """Diagonal entries strictly above every off-diagonal entry of their row and column."""
    off = rng.uniform(0.0, 1.0, size=2)
    diag = rng.uniform(1.05, 3.0, size=2)
    return [[diag[0], off[0]], [off[1], diag[1]]]


def coordinating_br_matrix(rng):
    """delta > 0 without being a coordination matrix in general."""
    while True:
        m = rng.uniform(-1, 2, size=(2, 2))
        if m[0, 0] - m[1, 0] - m[0, 1] + m[1, 1] > 0.05:
            return m.tolist()


def opponent_coordinating_matrix(rng):
    while True:
        m = rng.uniform(0, 2, size=(2, 2))
        if m[0, 0] >= m[0, 1] + 0.01 and m[1, 1] >= m[1, 0] + 0.01:
            return m.tolist()


def tiebreaker(rng, n, i, kinds=("min", "current", "designated")):
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "designated":
        return TieBreaker("designated", int(rng.integers(n)))
    return TieBreaker(kind)


def mixed_game(seed, n=None, lo=4, hi=10, p=0.5, rules=RULES, payoff=coordination_matrix):
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(lo, hi + 1))
    edges = random_edges(rng, n, p)
    rs = [rules[int(rng.integers(len(rules)))] for _ in range(n)]
    pay = [payoff(rng) for _ in range(n)]
    tbs = [tiebreaker(rng, n, i) for i in range(n)]
    g = NetworkGame(Network(n, edges), pay, rs, tbs, alphabet=("1", "2"), name=f"mixed-{seed}")
    x0 = tuple(int(v) for v in rng.integers(0, 2, n))
    return g, x0


def family(name, seed, n=None):
    """The four binary rule families checked for restrictive coordination."""
    if name == "br":
        return mixed_game(seed, n, lo=2, hi=6, rules=("best-response",), payoff=coordinating_br_matrix)
    if name == "im":
        return mixed_game(seed, n, lo=2, hi=6, rules=("imitation",), payoff=opponent_coordinating_matrix)
    if name == "ri":
        return mixed_game(seed, n, lo=2, hi=6, rules=("rational-imitation",))
    if name == "mixed":
        return mixed_game(seed, n, lo=3, hi=6)
    raise KeyError(name)


def as_plain(game):
    """(adj, pay, rules, tbs) for the oracles."""
    adj = [list(s) for s in game.network.neighbors]
    pay = [p.tolist() for p in game.payoffs]
    tbs = [(tb.kind, tb.agent) for tb in game.tiebreakers]
    return adj, pay, list(game.rules), tbs
