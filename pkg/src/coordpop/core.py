"""Populations, activation sequences and the asynchronous update loop.

Agents are indexed ``0..n-1`` and choices are stored as integer indices into a
:class:`ChoiceAlphabet`.  A revision protocol is any callable ``f(x) -> int``
taking the full state (a sequence of choice indices) and returning the choice
the agent tends to pick.
"""
from __future__ import annotations

import csv
import heapq
import io
import json
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

Protocol = Callable[[Sequence[int]], int]
State = tuple

_RANDOM_BLOCK = 4096


class MalformedProtocol(ValueError):
    """A protocol returned something outside the alphabet."""


@dataclass(frozen=True)
class ChoiceAlphabet:
    labels: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) < 2:
            raise ValueError("an alphabet needs at least two choices")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate choice labels in {labels!r}")

    def __len__(self):
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            # accept str/int mismatches coming from JSON or the command line
            for k, lab in enumerate(self.labels):
                if str(lab) == str(label):
                    return k
            raise KeyError(f"unknown choice {label!r}; alphabet is {self.labels}") from None

    def encode(self, labels) -> State:
        return tuple(self.index(lab) for lab in labels)

    def decode(self, x) -> tuple:
        return tuple(self.labels[c] for c in x)


class Population:
    """The triple (agents, alphabet, protocols).

    ``dependents[k]`` optionally lists the agents whose protocol reads ``x[k]``.
    It is only used to skip provably redundant protocol evaluations; results are
    the same with or without it.
    """

    def __init__(self, alphabet, protocols: Sequence[Protocol], dependents=None, name: str = "",
                 normalized: bool = False):
        if not isinstance(alphabet, ChoiceAlphabet):
            alphabet = ChoiceAlphabet(tuple(alphabet))
        if len(protocols) < 1:
            raise ValueError("a population needs at least one agent")
        self.alphabet = alphabet
        self.protocols = tuple(protocols)
        self.name = name
        if dependents is not None and not normalized:
            if len(dependents) != len(self.protocols):
                raise ValueError("dependents must have one entry per agent")
            # an agent always depends on itself, so a switch re-checks the switcher
            dependents = tuple(tuple(sorted(set(d) | {k})) for k, d in enumerate(dependents))
        self.dependents = dependents

    @property
    def n(self) -> int:
        return len(self.protocols)

    @property
    def k(self) -> int:
        return len(self.alphabet)

    def tend(self, x: Sequence[int], i: int) -> int:
        c = self.protocols[i](x)
        if not isinstance(c, (int, np.integer)) or not 0 <= c < self.k:
            raise MalformedProtocol(f"protocol of agent {i} returned {c!r}")
        return int(c)

    def validate(self, x) -> State:
        x = tuple(int(c) for c in x)
        if len(x) != self.n:
            raise ValueError(f"state has length {len(x)}, population has {self.n} agents")
        if any(not 0 <= c < self.k for c in x):
            raise ValueError(f"state {x} has entries outside the alphabet")
        return x

    def __repr__(self):
        return f"Population(n={self.n}, alphabet={self.alphabet.labels}, name={self.name!r})"


def step(pop: Population, x: Sequence[int], agent: int) -> State:
    if not 0 <= agent < pop.n:
        raise IndexError(f"agent {agent} out of range for n={pop.n}")
    x = tuple(x)
    c = pop.tend(x, agent)
    if c == x[agent]:
        return x
    return x[:agent] + (c,) + x[agent + 1:]


def unsatisfied(pop: Population, x: Sequence[int]) -> list[int]:
    return [i for i in range(pop.n) if pop.tend(x, i) != x[i]]


def is_equilibrium(pop: Population, x: Sequence[int]) -> bool:
    x = tuple(x)
    return all(pop.tend(x, i) == x[i] for i in range(pop.n))


# ---------------------------------------------------------------------------
# activation sequences


@dataclass(frozen=True)
class ActivationSequence:
    """How agents are activated.

    kinds: ``explicit`` (finite list, optionally repeated), ``round-robin``
    (0, 1, ..., n-1 rotated by ``offset``), ``uniform`` (i.i.d. uniform draws)
    and ``weights`` (i.i.d. draws from a fixed, strictly positive distribution).
    """

    kind: str
    entries: tuple = ()
    repeat: bool = False
    offset: int = 0
    seed: int | None = None
    weights: tuple | None = None
    floor: float = 1e-6

    @classmethod
    def explicit(cls, entries, repeat=False):
        return cls("explicit", entries=tuple(int(a) for a in entries), repeat=repeat)

    @classmethod
    def round_robin(cls, offset=0):
        return cls("round-robin", offset=offset)

    @classmethod
    def uniform(cls, seed=None):
        return cls("uniform", seed=seed)

    @classmethod
    def weighted(cls, weights, seed=None, floor=1e-6):
        return cls("weights", weights=tuple(float(w) for w in weights), seed=seed, floor=floor)

    @property
    def deterministic(self) -> bool:
        return self.kind in ("explicit", "round-robin")

    def period(self, n: int) -> int | None:
        if self.kind == "round-robin":
            return n
        if self.kind == "explicit" and self.repeat:
            return len(self.entries)
        return None

    def probabilities(self, n: int) -> np.ndarray:
        if self.kind == "uniform":
            return np.full(n, 1.0 / n)
        if self.kind != "weights":
            raise ValueError(f"{self.kind} sequences have no activation distribution")
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (n,):
            raise ValueError(f"need {n} weights, got {w.shape}")
        if np.any(w <= 0):
            raise ValueError("activation weights must be strictly positive")
        p = w / w.sum()
        if p.min() < self.floor:
            raise ValueError(f"activation probability {p.min():.3g} below the floor {self.floor}")
        return p

    def agents(self, n: int) -> Iterator[int]:
        if self.kind == "explicit":
            if any(not 0 <= a < n for a in self.entries):
                raise ValueError(f"explicit sequence has agents outside 0..{n - 1}")
            while True:
                yield from self.entries
                if not self.repeat or not self.entries:
                    return
        elif self.kind == "round-robin":
            t = 0
            while True:
                yield (self.offset + t) % n
                t += 1
        elif self.kind in ("uniform", "weights"):
            rng = np.random.default_rng(self.seed)
            p = None if self.kind == "uniform" else self.probabilities(n)
            while True:
                if p is None:
                    block = rng.integers(0, n, size=_RANDOM_BLOCK)
                else:
                    block = rng.choice(n, size=_RANDOM_BLOCK, p=p)
                yield from block.tolist()
        else:
            raise ValueError(f"unknown activation sequence kind {self.kind!r}")

    def to_json(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "explicit":
            d.update(entries=list(self.entries), repeat=self.repeat)
        if self.kind == "round-robin":
            d["offset"] = self.offset
        if self.kind in ("uniform", "weights"):
            d["seed"] = self.seed
        if self.kind == "weights":
            d["weights"] = list(self.weights)
        return d


def canonical_sequence(n: int) -> tuple:
    """The finite sequence (S_1, ..., S_n) that equilibrates any coordinating population.

    S_1 = (0) and S_i = (i-1, D, ..., D) with D = (i-2, ..., 0) repeated i-1 times
    (zero-based agent ids).
    """
    if n < 1:
        raise ValueError("n must be positive")
    seq = [0]
    for i in range(2, n + 1):
        down = list(range(i - 2, -1, -1))
        seq.append(i - 1)
        seq.extend(down * (i - 1))
    return tuple(seq)


def canonical_length(n: int) -> int:
    return sum(1 + (i - 1) ** 2 for i in range(1, n + 1))


def default_max_steps(n: int) -> int:
    return max(canonical_length(n), 50 * n * n)


# ---------------------------------------------------------------------------
# traces


@dataclass(frozen=True)
class Switch:
    t: int  # time at which the new choice is in place
    agent: int
    before: int
    after: int


@dataclass(frozen=True)
class Verdict:
    kind: str  # equilibrium | cycle | budget-exhausted
    time: int
    period: int | None = None

    def __str__(self):
        if self.kind == "equilibrium":
            return f"equilibrium({self.time})"
        if self.kind == "cycle":
            return f"cycle(period={self.period}, entry={self.time})"
        return f"budget-exhausted({self.time})"


@dataclass
class RunTrace:
    x0: State
    final: State
    steps: int
    verdict: Verdict
    switches: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)
    activations: list | None = None

    def state_at(self, t: int) -> State:
        if not 0 <= t <= self.steps:
            raise IndexError(t)
        base_t = max((s for s in self.snapshots if s <= t), default=0)
        x = list(self.snapshots.get(base_t, self.x0))
        for sw in self.switches:
            if base_t < sw.t <= t:
                x[sw.agent] = sw.after
        return tuple(x)

    def states(self) -> list:
        out, x, k = [self.x0], list(self.x0), 0
        for t in range(1, self.steps + 1):
            while k < len(self.switches) and self.switches[k].t == t:
                x[self.switches[k].agent] = self.switches[k].after
                k += 1
            out.append(tuple(x))
        return out

    def to_json(self, alphabet: ChoiceAlphabet | None = None) -> dict:
        lab = (lambda c: alphabet.labels[c]) if alphabet else (lambda c: c)
        return {
            "x0": [lab(c) for c in self.x0],
            "final": [lab(c) for c in self.final],
            "steps": self.steps,
            "verdict": {"kind": self.verdict.kind, "time": self.verdict.time, "period": self.verdict.period},
            "switches": [[s.t, s.agent, lab(s.before), lab(s.after)] for s in self.switches],
            "snapshots": {str(t): [lab(c) for c in x] for t, x in sorted(self.snapshots.items())},
        }

    def to_csv(self, alphabet: ChoiceAlphabet | None = None) -> str:
        lab = (lambda c: alphabet.labels[c]) if alphabet else (lambda c: c)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "agent", "from", "to"])
        for s in self.switches:
            w.writerow([s.t, s.agent, lab(s.before), lab(s.after)])
        return buf.getvalue()

    @classmethod
    def from_json(cls, doc: dict, alphabet: ChoiceAlphabet | None = None) -> "RunTrace":
        enc = (lambda v: alphabet.index(v)) if alphabet else int
        v = doc["verdict"]
        return cls(
            x0=tuple(enc(c) for c in doc["x0"]),
            final=tuple(enc(c) for c in doc["final"]),
            steps=doc["steps"],
            verdict=Verdict(v["kind"], v["time"], v.get("period")),
            switches=[Switch(t, a, enc(b), enc(c)) for t, a, b, c in doc["switches"]],
            snapshots={int(t): tuple(enc(c) for c in x) for t, x in doc.get("snapshots", {}).items()},
        )


class _Satisfaction:
    """Tracks the set of agents that currently want to switch."""

    def __init__(self, pop: Population, x: list):
        self.pop = pop
        self.bad = {i for i in range(pop.n) if pop.tend(x, i) != x[i]}

    def update(self, x: list, agent: int):
        pop = self.pop
        cands = pop.dependents[agent] if pop.dependents is not None else range(pop.n)
        for j in cands:
            if pop.tend(x, j) != x[j]:
                self.bad.add(j)
            else:
                self.bad.discard(j)


def run(
    pop: Population,
    x0: Sequence[int],
    seq: ActivationSequence,
    max_steps: int | None = None,
    detect_cycles: bool = False,
    snapshot_every: int | None = None,
    full_snapshots: bool = False,
    record_activations: bool = False,
) -> RunTrace:
    """Apply the update loop along ``seq`` until a verdict is reached.

    Equilibrium is declared at the first time every agent is satisfied (an
    exhaustive check, maintained incrementally).  Cycles are only detected for
    periodic deterministic sequences, keyed on (state, position in period).
    """
    x = list(pop.validate(x0))
    n = pop.n
    if max_steps is None:
        max_steps = default_max_steps(n)
    if max_steps < 0:
        raise ValueError("max_steps must be nonnegative")
    if snapshot_every is None:
        snapshot_every = n
    period = seq.period(n) if detect_cycles else None
    if detect_cycles and period is None:
        raise ValueError("cycle detection needs a periodic deterministic sequence")

    x0t = tuple(x)
    switches: list[Switch] = []
    snapshots: dict = {0: x0t} if full_snapshots else {}
    acts = [] if record_activations else None
    sat = _Satisfaction(pop, x)
    seen = {(x0t, 0): 0} if period else None

    def done(verdict, t):
        return RunTrace(x0t, tuple(x), t, verdict, switches, snapshots, acts)

    if not sat.bad:
        return done(Verdict("equilibrium", 0), 0)

    t = 0
    it = seq.agents(n)
    while t < max_steps:
        try:
            a = next(it)
        except StopIteration:
            break
        if acts is not None:
            acts.append(a)
        c = pop.tend(x, a)
        t += 1
        if c != x[a]:
            switches.append(Switch(t, a, x[a], c))
            x[a] = c
            sat.update(x, a)
        if full_snapshots or (snapshot_every and t % snapshot_every == 0):
            snapshots[t] = tuple(x)
        if not sat.bad:
            return done(Verdict("equilibrium", t), t)
        if period:
            key = (tuple(x), t % period)
            if key in seen:
                return done(Verdict("cycle", seen[key], t - seen[key]), t)
            seen[key] = t
    return done(Verdict("budget-exhausted", t), t)


def equilibrate(
    pop: Population,
    x: Sequence[int],
    dirty=None,
    max_sweeps: int | None = None,
):
    """Round-robin sweeps (agent 0 first) until a full sweep produces no switch.

    ``dirty`` restricts the first sweep to agents whose protocol may have
    changed since ``x`` was last an equilibrium; clean agents are skipped, which
    gives the same final state as evaluating them.  Returns ``(state, switches,
    sweeps)`` with switches as ``(agent, before, after)`` tuples.
    """
    x = list(x)
    n = pop.n
    deps = pop.dependents if pop.dependents is not None else [range(n)] * n
    current = sorted(set(range(n) if dirty is None else dirty))
    heapq.heapify(current)
    pending: set = set(current)
    later: set = set()
    switches = []
    sweeps = 0
    while current:
        sweeps += 1
        if max_sweeps is not None and sweeps > max_sweeps:
            raise RuntimeError(f"no equilibrium after {max_sweeps} sweeps")
        while current:
            i = heapq.heappop(current)
            pending.discard(i)
            c = pop.tend(x, i)
            if c != x[i]:
                switches.append((i, x[i], c))
                x[i] = c
                for j in deps[i]:
                    if j in pending:
                        continue
                    if j > i:
                        heapq.heappush(current, j)
                        pending.add(j)
                    else:
                        later.add(j)
        if later:
            current = sorted(later)
            pending = set(current)
            later = set()
    return tuple(x), switches, sweeps


def dump_trace(trace: RunTrace, path, alphabet=None):
    path = str(path)
    if path.endswith(".csv"):
        with open(path, "w", newline="") as fh:
            fh.write(trace.to_csv(alphabet))
    else:
        with open(path, "w") as fh:
            json.dump(trace.to_json(alphabet), fh, indent=1)
