import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from corpus import as_plain, mixed_game
from coordpop import exemplars as ex
from coordpop.netgames import (Network, NetworkGame, TieBreaker, delta, gamma, is_coordinating_br,
                               is_coordination_matrix, is_opponent_coordinating, rule_name, threshold)


def test_network_basics(tmp_path):
    net = Network(4, [(0, 1), (1, 2)])
    assert net.neighbors[1] == (0, 2) and net.closed[1] == (0, 1, 2)
    assert net.isolated() == [3] and net.degree(1) == 2
    with pytest.raises(ValueError):
        Network(3, [(1, 1)])
    p = tmp_path / "edges.csv"
    net.to_edge_csv(p)
    assert Network.from_edge_csv(p, n=4) == net


def test_payoff_predicates_and_quantities():
    pi = [[1, 0], [0, 1]]
    assert gamma(pi) == 1 and delta(pi) == 2
    assert is_coordinating_br(pi) and is_opponent_coordinating(pi) and is_coordination_matrix(pi)
    assert not is_coordinating_br([[0, 1], [1, 0]])
    assert is_opponent_coordinating([[2, 1], [3, 4]]) and not is_coordination_matrix([[2, 1], [3, 4]])
    assert threshold([[1 / 3, 0], [0, 2 / 3]], 3) == oracles.ceil_threshold(2 / 3, 1, 3) == 2


def test_rule_aliases():
    assert rule_name("BR") == "best-response" and rule_name("ri") == "rational-imitation"
    with pytest.raises(ValueError):
        rule_name("copycat")


def test_example5_utilities():
    g = ex.example5()
    y = g.alphabet.encode(ex.EXAMPLE5_Y)
    Y, B, R = (g.alphabet.index(c) for c in "YBR")
    assert g.utility(y, 0, B) == 20 and g.utility(y, 0, Y) == 15 and g.utility(y, 0, R) == 15
    assert g.best_response_set(y, 0) == {B}


def test_trivial_utilities():
    g = NetworkGame(Network.path(2), np.zeros((2, 2)))
    assert g.utility((0, 1), 0) == 0
    g = NetworkGame(Network.path(2), np.eye(2))
    assert g.utility((0, 0), 0) == g.utility((0, 0), 1) == 1


def test_isolated_agent_sets():
    g = NetworkGame(Network(2, []), np.eye(2))
    assert g.best_response_set((0, 1), 0) == {0, 1}
    assert g.better_reply_set((0, 1), 0) == frozenset()


def test_imitation_on_a_path():
    # 0 - 1 - 2 with agent 2 on the other strategy, large reward for coordinating on A
    g = NetworkGame(Network.path(3), [[5.0, 0.0], [0.0, 1.0]], rules="imitation")
    x = (0, 0, 1)
    us = [g.utility(x, i) for i in range(3)]
    assert us == [5.0, 5.0, 0.0]
    assert g.imitation_set(x, 1) == {0}
    assert g.imitation_set((1, 1, 1), 1) == {1}


def test_fig6_imitation_sets():
    g = ex.fig6_imitation()
    y, z = g.alphabet.encode(ex.FIG6_Y), g.alphabet.encode(ex.FIG6_Z)
    Y, R = g.alphabet.index("Y"), g.alphabet.index("R")
    assert R in g.imitation_set(y, 0) and Y in g.imitation_set(z, 0)


def test_better_reply_and_rational_imitation():
    g = NetworkGame(Network.star(2), [[1.0, 0.0], [0.0, 2.0]], rules="rational-imitation")
    x = (0, 1, 1)
    assert g.better_reply_set(x, 0) == {1}
    # the leaves earn 2 each, the centre 0: imitating 2 is also a better reply
    assert g.rational_imitation_set(x, 0) == {1}
    # at all-1 nobody has a better reply and the fallback keeps x_i
    assert g.rational_imitation_set((0, 0, 0), 0) == {0}


def test_tiebreaker_resolution():
    g = NetworkGame(Network(1, []), np.eye(2), tiebreakers=TieBreaker("current"))
    assert g.resolve((1,), 0) == 1
    g = NetworkGame(Network(1, []), np.eye(2), tiebreakers=TieBreaker("min"))
    assert g.resolve((1,), 0) == 0
    assert TieBreaker("designated", 2)({0, 1}, (0, 0, 1), 0) == 1
    assert TieBreaker("min")({1}, (0,), 0) == 1


def test_json_roundtrip(tmp_path):
    g, x0 = mixed_game(7)
    p = tmp_path / "g.json"
    g.save(p)
    h = NetworkGame.load(p)
    assert h.to_json() == g.to_json()
    assert all(g.resolve(x0, i) == h.resolve(x0, i) for i in range(g.n))
    doc = json.loads(p.read_text())
    assert {"nodes", "edges", "alphabet", "agents"} <= set(doc)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 10**6), xs=st.integers(0, 2**10 - 1))
def test_feasible_sets_match_oracle(seed, xs):
    g, _ = mixed_game(seed)
    adj, pay, rules, tbs = as_plain(g)
    x = tuple((xs >> i) & 1 for i in range(g.n))
    for i in range(g.n):
        assert g.best_response_set(x, i) == oracles.br_set(adj, pay, x, i)
        assert g.imitation_set(x, i) == oracles.im_set(adj, pay, x, i)
        assert g.better_reply_set(x, i) == oracles.better_set(adj, pay, x, i)
        assert g.rational_imitation_set(x, i) == oracles.ri_set(adj, pay, x, i)
        assert g.resolve(x, i) == oracles.protocol(adj, pay, rules, tbs, i)(x)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), shift=st.floats(-5, 5), col=st.integers(0, 1))
def test_best_response_invariant_under_column_shift(seed, shift, col):
    g, x0 = mixed_game(seed, rules=("best-response",))
    pay = [p.copy() for p in g.payoffs]
    for p in pay:
        p[:, col] += shift
    h = g.replace(payoffs=pay)
    for i in range(g.n):
        assert g.best_response_set(x0, i) == h.best_response_set(x0, i)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_threshold_form_of_best_response(seed):
    g, x0 = mixed_game(seed, rules=("best-response",))
    for i in range(g.n):
        d = g.network.degree(i)
        if d == 0:
            continue
        n1 = sum(1 for j in g.network.neighbors[i] if x0[j] == 0)
        t = threshold(g.payoffs[i], d)
        if n1 > t:
            assert g.best_response_set(x0, i) == {0}
        elif n1 < t:
            assert g.best_response_set(x0, i) == {1}
