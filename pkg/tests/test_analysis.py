import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from corpus import as_plain, family
from coordpop import exemplars as ex
from coordpop.analysis import (BudgetExceeded, PropertyVerdict, a_pair_violated, check_A_coordinating_agent,
                               check_coordinating, check_coordinating_agent, check_coordinating_tiebreaker,
                               check_restrictive_coordinating, check_satisfaction_supermodular,
                               check_supermodular_utility, coordinating_pair_violated, kset, replay_witness)
from coordpop.core import Population
from coordpop.netgames import Network, NetworkGame, TieBreaker


def test_kset_examples():
    A, B = 0, 1
    assert kset((A, B, A), (A, B, A)) == frozenset()
    assert kset((B, B, A), (A, B, A)) == {B}
    assert kset((B, A), (A, B)) == {A, B}
    with pytest.raises(ValueError):
        kset((A,), (A, B))


@given(st.lists(st.integers(0, 2), min_size=1, max_size=6), st.lists(st.integers(0, 2), min_size=1, max_size=6))
def test_kset_empty_iff_equal(z, y):
    if len(z) != len(y):
        return
    assert (kset(z, y) == frozenset()) == (tuple(z) == tuple(y))
    assert kset(z, y) == oracles.kset(z, y)


def _random_table_population(seed, n, k):
    """Every agent gets an arbitrary lookup-table protocol."""
    rng = np.random.default_rng(seed)
    tables = [dict() for _ in range(n)]
    for x in oracles.states(n, k):
        for i in range(n):
            tables[i][x] = int(rng.integers(k))
    protos = [(lambda x, t=t: t[tuple(x)]) for t in tables]
    return Population(tuple("abc"[:k]), protos), tables


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 3), k=st.integers(2, 3))
def test_coordinating_checker_agrees_with_definition(seed, n, k):
    pop, tables = _random_table_population(seed, n, k)
    for i in range(n):
        v = check_coordinating_agent(pop, i)
        ref = oracles.coordinating(lambda x: tables[i][x], n, k)
        assert v.holds == (ref is None)
        if not v.holds:
            assert replay_witness(v, pop)
            y, z = v.witness["y"], v.witness["z"]
            assert coordinating_pair_violated(pop, i, y, z)


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 3), k=st.integers(2, 3))
def test_a_coordinating_checker_agrees_with_definition(seed, n, k):
    pop, tables = _random_table_population(seed, n, k)
    for i in range(n):
        for a in range(k):
            v = check_A_coordinating_agent(pop, i, a)
            ref = oracles.a_coordinating(lambda x: tables[i][x], n, k, a)
            assert v.holds == (ref is None)
            if not v.holds:
                assert a_pair_violated(pop, i, a, v.witness["y"], v.witness["z"])


def test_constant_protocol_is_coordinating_and_restrictive():
    pop = ex.constant_population(3, choice=1)
    assert check_coordinating(pop).holds
    assert check_A_coordinating_agent(pop, 0, 1).holds
    assert check_restrictive_coordinating(Population(("a", "b"), [lambda x: 0])).holds


def test_example4_coordinating_and_restrictive():
    pop = ex.example4(3)
    for i in range(3):
        assert check_coordinating_agent(pop, i).holds
        for a in range(2):
            assert check_A_coordinating_agent(pop, i, a).holds
    assert check_restrictive_coordinating(pop).holds


def test_example5_not_b_coordinating():
    g = ex.example5()
    pop = g.population()
    Bc = g.alphabet.index("B")
    v = check_A_coordinating_agent(pop, 0, Bc)
    assert not v.holds and v.prop == "B-coordinating"
    assert replay_witness(v, pop)
    # the drawn state pair: in y the centre tends to B, in z (where every B-player still plays B) it does not
    y, z = g.alphabet.encode(ex.EXAMPLE5_Y), g.alphabet.encode(ex.EXAMPLE5_Z)
    assert a_pair_violated(pop, 0, Bc, y, z)


def test_example6_not_coordinating_with_witness():
    g = ex.example6()
    pop = g.population()
    v = check_coordinating_agent(pop, 0)
    assert not v.holds and replay_witness(v, pop)
    y, z = g.alphabet.encode(ex.EXAMPLE6_Y), g.alphabet.encode(ex.EXAMPLE6_Z)
    assert coordinating_pair_violated(pop, 0, y, z)


def test_fig6_imitation_fails_both():
    g = ex.fig6_imitation()
    pop = g.population()
    y, z = g.alphabet.encode(ex.FIG6_Y), g.alphabet.encode(ex.FIG6_Z)
    Y, R = g.alphabet.index("Y"), g.alphabet.index("R")
    assert pop.tend(y, 0) == R and pop.tend(z, 0) == Y
    assert coordinating_pair_violated(pop, 0, y, z)
    v = check_coordinating_agent(pop, 0, sample=20000, seed=1)
    assert not v.holds and v.mode == "sampled" and replay_witness(v, pop)
    v = check_restrictive_coordinating(pop, sample=20000, seed=1)
    assert not v.holds


def test_example3_small_not_restrictive():
    pop = ex.example3_small(3).population()
    v = check_restrictive_coordinating(pop)
    assert not v.holds and replay_witness(v, pop)


def test_tiebreakers():
    pop = Population(("1", "2"), [lambda x: 0] * 3)
    assert check_coordinating_tiebreaker(TieBreaker("min"), pop, 0).holds
    assert check_coordinating_tiebreaker(TieBreaker("current"), pop, 0).holds
    v = check_coordinating_tiebreaker(TieBreaker("opposite", 1), pop, 0)
    assert not v.holds and replay_witness(v, pop, tb=TieBreaker("opposite", 1))


def test_supermodularity_of_coordination_utility():
    g = NetworkGame(Network.path(3), [[2.0, 0.5], [0.3, 1.0]], alphabet=("1", "2"))
    for i in range(3):
        assert check_supermodular_utility(lambda x, i=i: g.utility(x, i), 3, i).holds


def test_one_minus_own_supermodular_and_flip_not_coordinating():
    assert check_supermodular_utility(ex.one_minus_own, 1, 0).holds
    v = check_coordinating(ex.flip_population(1))
    assert not v.holds
    # the recorded pair: z_i = 1 and y_i = 0 (indices 0 and 1)
    assert v.witness["z"] != v.witness["y"]


def test_satisfaction_supermodular():
    g, _ = family("br", 3, n=4)
    pop = g.population()
    assert check_restrictive_coordinating(pop).holds
    for i in range(4):
        assert check_satisfaction_supermodular(pop, i).holds
    v = check_satisfaction_supermodular(ex.example1(), 0)
    assert not v.holds and replay_witness(v, ex.example1())


def test_budget_and_sampling():
    g = ex.fig6_imitation()
    with pytest.raises(BudgetExceeded):
        check_coordinating_agent(g.population(), 0)
    v = check_coordinating_agent(ex.constant_population(13), 0, sample=500)
    assert v.holds and v.mode == "sampled" and "sampled" in v.summary()


def test_verdict_json():
    g = ex.example6()
    v = check_coordinating_agent(g.population(), 0)
    doc = json.loads(json.dumps(v.to_json(g.alphabet)))
    assert doc["holds"] is False and doc["witness"]["y"][0] in g.alphabet.labels


@pytest.mark.parametrize("name", ["br", "im", "ri", "mixed"])
def test_restrictive_checker_matches_oracle_on_games(name):
    for seed in range(6):
        g, _ = family(name, seed, n=4)
        adj, pay, rules, tbs = as_plain(g)
        fs = [oracles.protocol(adj, pay, rules, tbs, i) for i in range(g.n)]
        assert check_restrictive_coordinating(g.population()).holds == oracles.restrictive(fs, g.n, 2)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_restrictive_implies_coordinating(seed):
    pop, _ = _random_table_population(seed, 2, 2)
    if check_restrictive_coordinating(pop).holds:
        assert check_coordinating(pop).holds
    # binary alphabets: the two notions coincide
    assert check_restrictive_coordinating(pop).holds == check_coordinating(pop).holds
