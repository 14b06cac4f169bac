"""Executable versions of the worked examples.

Agent ids are zero-based here: agent "1" of a figure is index 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ActivationSequence, ChoiceAlphabet, Population, _RANDOM_BLOCK
from .netgames import Network, NetworkGame, TieBreaker
from .pgg import PublicGoodsGame

# ---------------------------------------------------------------------------
# least common colour


def example1_protocol(x) -> int:
    """Least common choice over the whole population; ties go to index 0."""
    counts = [0, 0]
    for c in x:
        counts[c] += 1
    return 0 if counts[0] <= counts[1] else 1


def example1() -> Population:
    return Population(("Red", "Blue"), [example1_protocol] * 3, name="example1")


EXAMPLE1_X0 = (0, 0, 0)  # all red
FIG1_SEQUENCE = (1, 2, 1, 0, 2, 1, 0)

# ---------------------------------------------------------------------------
# successor copying


class CyclicCopy:
    __slots__ = ("n", "i")

    def __init__(self, n, i):
        self.n, self.i = n, i

    def __call__(self, x):
        return x[(self.i + 1) % self.n]


def cyclic_copy_protocol(n, x, i):
    return x[(i + 1) % n]


def example4(n: int = 3) -> Population:
    if n < 3 or n % 2 == 0:
        raise ValueError("the successor-copy example needs an odd n >= 3")
    deps = [[(k - 1) % n] for k in range(n)]
    return Population(("A", "B"), [CyclicCopy(n, i) for i in range(n)], dependents=deps, name=f"example4-n{n}")


def example4_x0(n: int = 3) -> tuple:
    return tuple(i % 2 for i in range(n))


# ---------------------------------------------------------------------------
# planar populations


class DuplicateDistances(ValueError):
    pass


@dataclass
class PlanarPopulation:
    points: np.ndarray
    kind: str = "nearest-neighbor"  # or radius-plurality
    radius: float = 50.0
    k: int = 4

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        n = len(self.points)
        d = np.sqrt(((self.points[:, None, :] - self.points[None, :, :]) ** 2).sum(-1))
        self.dist = d
        if self.kind == "nearest-neighbor":
            iu = np.triu_indices(n, 1)
            vals = np.sort(d[iu])
            if len(vals) and (vals[0] <= 0 or np.any(np.diff(vals) <= 1e-12 * max(1.0, vals[-1]))):
                raise DuplicateDistances("pairwise distances must be distinct")
            dd = d + np.diag(np.full(n, np.inf))
            self.nn = np.argmin(dd, axis=1)
        elif self.kind == "radius-plurality":
            within = (d <= self.radius) & ~np.eye(n, dtype=bool)
            self.disc = [tuple(np.nonzero(row)[0].tolist()) for row in within]
            self.empty = [i for i, s in enumerate(self.disc) if not s]
        else:
            raise ValueError(f"unknown planar protocol {self.kind!r}")

    @property
    def n(self):
        return len(self.points)

    def population(self, alphabet=None) -> Population:
        alphabet = alphabet or tuple(str(a + 1) for a in range(self.k))
        if self.kind == "nearest-neighbor":
            protos = [_Copy(int(j)) for j in self.nn]
            deps = [[] for _ in range(self.n)]
            for i, j in enumerate(self.nn):
                deps[int(j)].append(i)
        else:
            protos = [_Plurality(i, self.disc[i], len(alphabet)) for i in range(self.n)]
            deps = [[] for _ in range(self.n)]
            for i, s in enumerate(self.disc):
                for j in s:
                    deps[j].append(i)
        return Population(alphabet, protos, dependents=deps, name=self.kind)


class _Copy:
    __slots__ = ("j",)

    def __init__(self, j):
        self.j = j

    def __call__(self, x):
        return x[self.j]


class _Plurality:
    __slots__ = ("i", "disc", "k")

    def __init__(self, i, disc, k):
        self.i, self.disc, self.k = i, disc, k

    def __call__(self, x):
        return radius_plurality_choice(x, self.i, self.disc, self.k)


def nearest_neighbor_protocol(pp: PlanarPopulation, x, i):
    return x[int(pp.nn[i])]


def radius_plurality_choice(x, i, disc, k):
    if not disc:
        return x[i]
    counts = [0] * k
    for j in disc:
        counts[x[j]] += 1
    top = max(counts)
    if counts[x[i]] == top:
        return x[i]
    return counts.index(top)


def radius_plurality_protocol(pp: PlanarPopulation, x, i):
    return radius_plurality_choice(x, i, pp.disc[i], pp.k)


def random_points(n, seed=None, side=500.0):
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    while True:
        pts = rng.random((n, 2)) * side
        try:
            PlanarPopulation(pts)
            return pts
        except DuplicateDistances:
            continue


def example2(n=200, seed=0, k=4) -> PlanarPopulation:
    return PlanarPopulation(random_points(n, seed), "nearest-neighbor", k=k)


def example3(n=200, seed=0, k=4, side=500.0) -> PlanarPopulation:
    return PlanarPopulation(random_points(n, seed, side), "radius-plurality", k=k)


def example3_small(k: int = 3) -> PlanarPopulation:
    """Five agents packed into one disc, so everyone sees everyone else."""
    pts = [(0, 0), (10, 0), (0, 10), (-10, 0), (0, -12)]
    return PlanarPopulation(pts, "radius-plurality", k=k)


# ---------------------------------------------------------------------------
# nearest-neighbour digraph


@dataclass
class ComponentReport:
    nodes: tuple
    cycle: tuple

    @property
    def ok(self):
        return len(self.cycle) == 2


def nn_digraph_structure(pp_or_points) -> list:
    """Weakly connected components of the nearest-neighbour digraph and their cycles."""
    pp = pp_or_points if isinstance(pp_or_points, PlanarPopulation) else PlanarPopulation(pp_or_points)
    nn = [int(j) for j in pp.nn]
    n = len(nn)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in enumerate(nn):
        ra, rb = find(i), find(j)
        if ra != rb:
            parent[ra] = rb
    comps = {}
    for i in range(n):
        comps.setdefault(find(i), []).append(i)
    out = []
    for nodes in comps.values():
        cycles = set()
        for s in nodes:
            seen, a = [], s
            while a not in seen:
                seen.append(a)
                a = nn[a]
            cyc = seen[seen.index(a):]
            m = cyc.index(min(cyc))
            cycles.add(tuple(cyc[m:] + cyc[:m]))
        if len(cycles) != 1:
            raise AssertionError(f"component with {len(cycles)} cycles")
        out.append(ComponentReport(tuple(sorted(nodes)), cycles.pop()))
    out.sort(key=lambda c: c.nodes[0])
    return out


def nn_batch_run(nn, X0, seeds, max_steps, check_every=None):
    """Run nearest-neighbour copying for many seeded uniform sequences at once.

    Draws the same activation blocks as ``ActivationSequence.uniform(seed)`` so
    row ``b`` reproduces the generic engine run with ``seeds[b]``.  Returns the
    final states and a boolean per row telling whether equilibrium was reached
    within ``max_steps``.  Equilibria are absorbing here, so checking every
    ``check_every`` steps loses nothing.
    """
    nn = np.asarray(nn)
    X = np.array(X0, dtype=np.int16, copy=True)
    b, n = X.shape
    rngs = [np.random.default_rng(s) for s in seeds]
    check_every = check_every or n
    rows = np.arange(b)
    done = np.all(X == X[:, nn], axis=1)
    t = 0
    while t < max_steps and not done.all():
        block = np.stack([r.integers(0, n, size=_RANDOM_BLOCK) for r in rngs])
        for c in range(_RANDOM_BLOCK):
            if t >= max_steps:
                break
            a = block[:, c]
            X[rows, a] = X[rows, nn[a]]
            t += 1
            if t % check_every == 0:
                done = np.all(X == X[:, nn], axis=1)
                if done.all():
                    break
    done = np.all(X == X[:, nn], axis=1)
    return X, done


# ---------------------------------------------------------------------------
# star counterexamples with three strategies

STAR_ALPHABET = ("Y", "B", "R")


def example5() -> NetworkGame:
    return NetworkGame(Network.star(6), np.diag([15.0, 10.0, 5.0]), alphabet=STAR_ALPHABET, name="example5")


EXAMPLE5_Y = ("B", "B", "Y", "R", "R", "R", "B")
EXAMPLE5_Z = ("B", "B", "Y", "B", "Y", "Y", "B")


def example6() -> NetworkGame:
    return NetworkGame(Network.star(6), np.diag([30.0, 10.0, 1.0]), alphabet=STAR_ALPHABET, name="example6")


EXAMPLE6_Y = ("B", "B", "Y", "R", "B", "B", "B")
EXAMPLE6_Z = ("B", "R", "Y", "B", "R", "R", "R")


def fig6_imitation() -> NetworkGame:
    """Centre 0 between a Y cluster (1-4) and a cluster 5-8 that flips from R to B."""
    edges = [(0, 1), (0, 5), (1, 2), (1, 3), (1, 4), (5, 6), (5, 7), (5, 8)]
    return NetworkGame(Network(9, edges), np.diag([100.0, 10.0, 1.0]), rules="imitation",
                       alphabet=("R", "Y", "B"), name="fig6-imitation")


# at y the far cluster plays R and 0 imitates it; at z it plays B and 0 keeps Y
FIG6_Y = ("Y",) * 5 + ("R",) * 4
FIG6_Z = ("Y",) * 5 + ("B",) * 4


# ---------------------------------------------------------------------------
# public goods imitation counterexample


def fig7_pgg() -> PublicGoodsGame:
    """Focal agent 1 sits between a defecting hub 0 and cooperators 7 and 8."""
    edges = [(0, 1), (0, 5), (0, 6), (0, 8), (1, 7), (1, 8), (2, 3), (2, 4), (2, 7), (3, 7),
             (4, 5), (6, 8), (7, 8)]
    return PublicGoodsGame(Network(9, edges), r=11.0, c=1.0, rules="imitation", name="fig7-pgg")


FIG7_Y = ("D", "C", "D", "C", "C", "D", "D", "C", "C")
FIG7_Z = ("D", "C", "D", "C", "C", "C", "C", "C", "C")
FIG7_FOCAL = 1

# ---------------------------------------------------------------------------
# supermodular utility whose agent is not coordinating

SUPERMODULAR_ALPHABET = ChoiceAlphabet(("1", "0"))


def one_minus_own(x, i=0) -> float:
    """u_i(x) = 1 - x_i with index 0 meaning the value 1."""
    return 1.0 - (1 if x[i] == 0 else 0)


def best_responder_to(utility, n, i, k=2):
    def f(x):
        us = []
        for q in range(k):
            y = list(x)
            y[i] = q
            us.append(utility(tuple(y)))
        top = max(us)
        feas = [q for q, u in enumerate(us) if u >= top - 1e-9]
        return x[i] if x[i] in feas else feas[0]
    return f


def supermodular_best_responder(n=1) -> Population:
    protos = [best_responder_to(lambda x, i=i: one_minus_own(x, i), n, i) for i in range(n)]
    return Population(SUPERMODULAR_ALPHABET, protos, name="one-minus-own-br")


def flip_population(n=1) -> Population:
    """f_i(x) = the choice i is not currently making."""
    return Population(SUPERMODULAR_ALPHABET, [(lambda x, i=i: 1 - x[i]) for i in range(n)], name="flip")


# ---------------------------------------------------------------------------
# simple fixtures


def constant_population(n=3, choice=0, k=2) -> Population:
    return Population(tuple(str(a) for a in range(k)), [(lambda x, c=choice: c)] * n, name="constant")


def binary_br_coordinating(n=5, seed=0) -> NetworkGame:
    rng = np.random.default_rng(seed)
    edges = [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < 0.5]
    return NetworkGame(Network(n, edges), [[1.0, 0.0], [0.0, 1.0]], alphabet=("1", "2"), name="br-coordinating")


def tiebreaker_probe(tb: TieBreaker, n=3, k=2) -> Population:
    """A population whose agent-0 protocol is irrelevant; only its shape matters to the checker."""
    return Population(tuple(str(a) for a in range(k)), [(lambda x: 0)] * n, name="tb-probe")


REGISTRY = {
    "example1": "least-common colour, three agents, never equilibrates",
    "example2": "nearest-neighbour copying in the plane",
    "example3": "radius-50 plurality in the plane",
    "example4": "successor copying on an odd ring; coordinating but cycles",
    "example5": "three-strategy best-response star, not B-coordinating",
    "example6": "three-strategy best-response star, not coordinating",
    "fig6": "three-strategy imitation network, not coordinating",
    "fig7": "public goods imitation network, not coordinating",
    "supermodular": "u_i = 1 - x_i and the flip protocol",
}


def get(name: str, **kw):
    """Return (population-or-game, default start state, default sequence)."""
    name = name.lower()
    if name == "example1":
        return example1(), EXAMPLE1_X0, ActivationSequence.explicit(FIG1_SEQUENCE)
    if name == "example4":
        n = kw.get("n", 3)
        return example4(n), example4_x0(n), ActivationSequence.round_robin()
    if name == "example2":
        pp = example2(kw.get("n", 200), kw.get("seed", 0))
        rng = np.random.default_rng(kw.get("seed", 0) + 1)
        return pp.population(), tuple(rng.integers(0, pp.k, pp.n).tolist()), ActivationSequence.uniform(kw.get("seed", 0))
    if name == "example3":
        pp = example3(kw.get("n", 200), kw.get("seed", 0))
        rng = np.random.default_rng(kw.get("seed", 0) + 1)
        return pp.population(), tuple(rng.integers(0, pp.k, pp.n).tolist()), ActivationSequence.uniform(kw.get("seed", 0))
    if name == "example5":
        g = example5()
        return g, g.alphabet.encode(EXAMPLE5_Y), ActivationSequence.round_robin()
    if name == "example6":
        g = example6()
        return g, g.alphabet.encode(EXAMPLE6_Y), ActivationSequence.round_robin()
    if name == "fig6":
        g = fig6_imitation()
        return g, g.alphabet.encode(FIG6_Y), ActivationSequence.round_robin()
    if name == "fig7":
        g = fig7_pgg()
        return g, g.alphabet.encode(FIG7_Y), ActivationSequence.round_robin()
    if name == "supermodular":
        return flip_population(1), (0,), ActivationSequence.round_robin()
    raise KeyError(f"unknown example {name!r}; known: {', '.join(REGISTRY)}")


def mean_nn_distance(points) -> float:
    pp = PlanarPopulation(points)
    return float(np.mean([pp.dist[i, j] for i, j in enumerate(pp.nn)]))

