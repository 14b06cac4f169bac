import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from coordpop import exemplars as ex
from coordpop.analysis import check_coordinating_agent, check_restrictive_coordinating, replay_witness
from coordpop.netgames import Network
from coordpop.pgg import (C, D, PublicGoodsGame, pgg_best_response_set, pgg_imitation_set,
                          pgg_rational_imitation_set, pgg_utility, random_pgg)


def _adj(g):
    return [list(s) for s in g.network.neighbors]


def test_all_defect_is_zero():
    g = PublicGoodsGame(Network.path(4), r=3.0)
    assert all(pgg_utility(g, (D,) * 4, i) == 0 for i in range(4))


def test_lonely_cooperator():
    g = PublicGoodsGame(Network(1, []), r=3.0, c=2.0)
    assert pgg_utility(g, (C,), 0) == pytest.approx(2.0 * (3.0 - 1))


def test_two_cooperators():
    g = PublicGoodsGame(Network.path(2), r=2.0, c=1.0)
    assert pgg_utility(g, (C, C), 0) == pytest.approx(2.0)


def test_square_rule_examples():
    # the square rule as stated: both at equality, C above, D below
    g = PublicGoodsGame(Network.complete(4), r=16.0)
    assert g.square_rule_best_response_set((D,) * 4, 0) == {C, D}
    g = PublicGoodsGame(Network.path(2), r=5.0)
    assert g.square_rule_best_response_set((D, D), 0) == {C} == pgg_best_response_set(g, (D, D), 0)
    g = PublicGoodsGame(Network.complete(3), r=1.0)
    assert g.square_rule_best_response_set((C,) * 3, 0) == {D} == pgg_best_response_set(g, (C,) * 3, 0)


def test_argmax_threshold_on_regular_graphs():
    # every group has the same size m, so the own-contribution share is r c and the cost m c
    cycle = Network(6, [(i, (i + 1) % 6) for i in range(6)])
    x = (C, D, C, D, D, C)
    for r, want in ((2.0, {D}), (3.0, {C, D}), (4.0, {C}), (9.0, {C})):
        g = PublicGoodsGame(cycle, r=r)
        for i in range(6):
            assert oracles.pgg_argmax(_adj(g), r, 1.0, x, i) == want == pgg_best_response_set(g, x, i)
    # between m and m^2 the square rule and the argmax disagree
    g = PublicGoodsGame(cycle, r=5.0)
    assert g.square_rule_best_response_set(x, 0) == {D} and pgg_best_response_set(g, x, 0) == {C}


def test_square_rule_differs_on_a_star():
    # the centre shares groups with smaller leaves, so it gains more than the rule predicts
    g = PublicGoodsGame(Network.star(3), r=10.0)
    x = (D,) * 4
    assert g.square_rule_best_response_set(x, 0) == {D}
    assert oracles.pgg_argmax(_adj(g), 10.0, 1.0, x, 0) == {C}
    assert pgg_best_response_set(g, x, 0) == {C}


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_utility_and_best_response_match_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    g = random_pgg(rng, n)
    x = tuple(int(v) for v in rng.integers(0, 2, n))
    adj = _adj(g)
    for i in range(n):
        assert pgg_utility(g, x, i) == pytest.approx(oracles.pgg_utility(adj, g.r, g.c, x, i), abs=1e-9)
        assert pgg_best_response_set(g, x, i) == oracles.pgg_argmax(adj, g.r, g.c, x, i)
        assert g.brute_best_response_set(x, i) == pgg_best_response_set(g, x, i)


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_pool_conservation(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 12))
    g = random_pgg(rng, n)
    x = tuple(int(v) for v in rng.integers(0, 2, n))
    paid_in, paid_out = g.pool_balance(x)
    assert paid_in == pytest.approx(paid_out, abs=1e-9)


def test_best_responders_restrictive_coordinating():
    rng = np.random.default_rng(3)
    for _ in range(10):
        g = random_pgg(rng, int(rng.integers(2, 7)))
        assert check_restrictive_coordinating(g.population()).holds


def test_fig7_fixture_not_coordinating():
    g = ex.fig7_pgg()
    pop = g.population()
    y, z = g.alphabet.encode(ex.FIG7_Y), g.alphabet.encode(ex.FIG7_Z)
    focal = ex.FIG7_FOCAL
    adj = _adj(g)
    uy = {j: oracles.pgg_utility(adj, g.r, g.c, y, j) for j in g.network.closed[focal]}
    uz = {j: oracles.pgg_utility(adj, g.r, g.c, z, j) for j in g.network.closed[focal]}
    # under y the richest neighbours are cooperators, under z it is the defecting hub 0
    assert {y[j] for j in uy if uy[j] == max(uy.values())} == {C}
    assert max(uz, key=uz.get) == 0 and z[0] == D
    assert pgg_imitation_set(g, y, focal) == {C} and pgg_imitation_set(g, z, focal) == {D}
    v = check_coordinating_agent(pop, focal)
    assert not v.holds and replay_witness(v, pop)


def test_imitation_consensus_and_rational_fallback():
    g = PublicGoodsGame(Network.path(3), r=2.0, rules="imitation")
    assert pgg_imitation_set(g, (C, C, C), 1) == {C}
    g = PublicGoodsGame(Network.path(3), r=2.0, rules="rational-imitation")
    # everybody defects: imitation offers only D, which is not a strict improvement
    assert pgg_rational_imitation_set(g, (D, D, D), 1) == {D}


def test_json_roundtrip():
    g = ex.fig7_pgg()
    h = PublicGoodsGame.from_json(g.to_json())
    assert h.to_json() == g.to_json()
