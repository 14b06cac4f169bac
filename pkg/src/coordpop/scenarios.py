"""Seeded random instances: geometric networks, payoffs and initial states."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .netgames import Network, NetworkGame, TieBreaker, is_coordinating_br, is_coordination_matrix

MIXES = {
    "br": {"best-response": 1.0},
    "im": {"imitation": 1.0},
    "mixed": {"best-response": 0.5, "imitation": 0.5},
    "all": {"best-response": 1 / 3, "imitation": 1 / 3, "rational-imitation": 1 / 3},
}


class GenerationError(RuntimeError):
    pass


@dataclass
class GenSpec:
    n: int = 20
    expected_degree: float = 6.0
    mix: dict = field(default_factory=lambda: {"best-response": 1.0})
    threshold_range: tuple = (0.0, 2 / 3)
    p_range: tuple = (1.0, 2.0)
    v_range: tuple = (0.0, 1.0)
    initial: str = "auto"  # auto | all-undesirable | bernoulli
    p_desirable: float = 1 / 3
    tiebreaker: str = "current"
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.mix, str):
            self.mix = dict(MIXES[self.mix])
        tot = sum(self.mix.values())
        if abs(tot - 1) > 1e-9:
            raise ValueError(f"rule fractions sum to {tot}, not 1")
        lo, hi = self.threshold_range
        if not (0 <= lo < hi <= 2 / 3 + 1e-12):
            raise ValueError("threshold range must lie in (0, 2/3]")
        if self.p_range[0] < 1:
            raise ValueError("coordination level p must be at least 1")
        if not (0 <= self.v_range[0] <= self.v_range[1] <= 1):
            raise ValueError("payoff variance v must lie in [0, 1]")
        self.threshold_range = tuple(self.threshold_range)
        self.p_range, self.v_range = tuple(self.p_range), tuple(self.v_range)

    def to_json(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: v for k, v in d.items() if k in cls.__dataclass_fields__})

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


def _rng(seed):
    # anything with a random() method stands in for a generator (handy in tests)
    return seed if hasattr(seed, "random") else np.random.default_rng(seed)


def connection_radius(n, expected_degree):
    """sqrt((1+E[deg])/n) on a square of area pi, rescaled to the unit square.

    With this radius a disc holds 1 + E[deg] points on average (itself included),
    so E[deg] is the mean degree away from the border.
    """
    return math.sqrt((1 + expected_degree) / (math.pi * n))


def gen_network(n: int, expected_degree: float = 6.0, seed=None, max_tries: int = 1000,
                radius: float | None = None) -> Network:
    """Random geometric graph in the unit square, resampled until no node is isolated."""
    if n < 2:
        raise ValueError("need at least two nodes")
    rng = _rng(seed)
    rad = connection_radius(n, expected_degree) if radius is None else radius
    for _ in range(max_tries):
        pts = rng.random((n, 2))
        d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
        adj = d2 <= rad * rad
        np.fill_diagonal(adj, False)
        if adj.any(axis=1).all():
            a, b = np.nonzero(np.triu(adj, 1))
            net = Network(n, zip(a.tolist(), b.tolist()))
            net.points = pts
            return net
    raise GenerationError(f"no isolation-free graph after {max_tries} tries (n={n}, radius={rad:.3f})")


def sample_threshold(rng, lo=0.0, hi=2 / 3):
    """Uniform on (lo, hi]; zero is excluded."""
    while True:
        t = hi - rng.random() * (hi - lo)  # in (lo, hi]
        if t > 0:
            return float(t)


def gen_br_payoff(tau: float) -> np.ndarray:
    if not 0 < tau < 1:
        raise ValueError("threshold must lie in (0, 1)")
    return np.array([[1 - tau, 0.0], [0.0, tau]])


def gen_im_payoff(p: float, v: float, seed=None, max_tries: int = 1000) -> np.ndarray:
    if p < 1 or not 0 <= v <= 1:
        raise ValueError("need p >= 1 and v in [0, 1]")
    rng = _rng(seed)
    for _ in range(max_tries):
        m = p * np.eye(2) + v * rng.random((2, 2))
        if is_coordination_matrix(m):
            return m
    raise GenerationError("could not draw a coordination matrix")


def gen_initial_state(kind: str, n: int, seed=None, p: float = 1 / 3, reject_all_undesirable=False,
                      max_tries: int = 10000) -> tuple:
    """Index 0 is the desirable strategy, index 1 the undesirable one."""
    if kind == "all-undesirable":
        return (1,) * n
    if kind != "bernoulli":
        raise ValueError(f"unknown initial state rule {kind!r}")
    rng = _rng(seed)
    for _ in range(max_tries):
        x = tuple(0 if u < p else 1 for u in rng.random(n))
        if not reject_all_undesirable or 0 in x:
            return x
    raise GenerationError("could not draw an initial state containing the desirable strategy")


def _assign_rules(rng, n, mix):
    names = list(mix)
    probs = np.array([mix[k] for k in names])
    counts = np.floor(probs * n).astype(int)
    # largest remainders get the leftover agents
    for k in np.argsort(-(probs * n - counts), kind="stable")[: n - counts.sum()]:
        counts[k] += 1
    rules = [name for name, c in zip(names, counts) for _ in range(c)]
    rng.shuffle(rules)
    return rules


@dataclass
class Instance:
    game: NetworkGame
    x0: tuple
    spec: GenSpec
    start_raw: tuple = ()

    def to_json(self):
        d = self.game.to_json()
        d["x0"] = [self.game.alphabet.labels[c] for c in self.x0]
        d["seed"] = self.spec.seed
        d["genspec"] = self.spec.to_json()
        return d


def generate_instance(spec: GenSpec, equilibrate_start: bool = True, max_redraws: int = 100) -> Instance:
    """A pure function of ``spec`` (including its seed).

    The drawn initial state is relaxed to an equilibrium with round-robin sweeps
    when ``equilibrate_start`` is set, since the control problems start there.
    Imitation-only instances whose relaxed state lost the desirable strategy are
    redrawn with the seed shifted by 10**6.
    """
    seed = spec.seed
    for _ in range(max_redraws + 1):
        inst = _draw(GenSpec(**{**spec.to_json(), "seed": seed}), equilibrate_start)
        if inst is not None:
            return inst
        seed += 10 ** 6
    raise GenerationError(f"relaxation removed the desirable strategy {max_redraws + 1} times (seed={spec.seed})")


def _draw(spec, equilibrate_start):
    from .core import equilibrate

    rng = np.random.default_rng(spec.seed)
    net = gen_network(spec.n, spec.expected_degree, rng)
    rules = _assign_rules(rng, spec.n, spec.mix)
    pay = []
    for r in rules:
        if r == "best-response":
            m = gen_br_payoff(sample_threshold(rng, *spec.threshold_range))
            assert is_coordinating_br(m)
        else:
            m = gen_im_payoff(rng.uniform(*spec.p_range), rng.uniform(*spec.v_range), rng)
        pay.append(m)
    game = NetworkGame(net, pay, rules, TieBreaker(spec.tiebreaker), alphabet=("1", "2"),
                       name=f"gen-n{spec.n}-s{spec.seed}")
    kind = spec.initial
    only_im = all(r == "imitation" for r in rules)
    if kind == "auto":
        kind = "bernoulli" if only_im else "all-undesirable"
    x0 = gen_initial_state(kind, spec.n, rng, spec.p_desirable, reject_all_undesirable=only_im)
    raw = x0
    if equilibrate_start:
        x0, _, _ = equilibrate(game.population(), x0)
        if only_im and 0 not in x0:
            return None
    return Instance(game, tuple(x0), spec, raw)
