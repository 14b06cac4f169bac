import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coordpop import exemplars as ex
from coordpop.core import ActivationSequence, is_equilibrium, run


def test_two_points_form_one_mutual_pair():
    comps = ex.nn_digraph_structure([(0, 0), (3, 4)])
    assert len(comps) == 1 and comps[0].cycle == (0, 1) and comps[0].ok


def test_collinear_chain():
    # gaps 1 and 1.1: 2 points at 1, which points back at 0
    comps = ex.nn_digraph_structure([(0, 0), (1, 0), (2.1, 0)])
    assert [c.nodes for c in comps] == [(0, 1, 2)] and comps[0].cycle == (0, 1)


def test_duplicate_distances_rejected():
    with pytest.raises(ex.DuplicateDistances):
        ex.PlanarPopulation([(0, 0), (1, 0), (2, 0)])
    with pytest.raises(ex.DuplicateDistances):
        ex.PlanarPopulation([(0, 0), (0, 0), (5, 1)])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(2, 60))
def test_every_component_has_one_two_cycle(seed, n):
    comps = ex.nn_digraph_structure(ex.random_points(n, seed))
    assert all(c.ok for c in comps)
    assert sorted(i for c in comps for i in c.nodes) == list(range(n))


def test_batch_runner_matches_generic_engine():
    pp = ex.example2(40, seed=5)
    pop = pp.population()
    rng = np.random.default_rng(0)
    X0 = rng.integers(0, pp.k, (6, pp.n))
    seeds = list(range(100, 106))
    X, done = ex.nn_batch_run(pp.nn, X0, seeds, max_steps=5000, check_every=1)
    for b, s in enumerate(seeds):
        tr = run(pop, tuple(X0[b].tolist()), ActivationSequence.uniform(s), max_steps=5000)
        assert tr.verdict.kind == "equilibrium" and done[b]
        assert tuple(X[b].tolist()) == tr.final


def test_nn_population_equilibria_are_pairwise_agreement():
    pp = ex.example2(30, seed=2)
    pop = pp.population()
    x = tuple(i % pp.k for i in range(pp.n))
    assert not is_equilibrium(pop, x)
    # colour each component uniformly
    comps = ex.nn_digraph_structure(pp)
    y = [0] * pp.n
    for c, comp in enumerate(comps):
        for i in comp.nodes:
            y[i] = c % pp.k
    assert is_equilibrium(pop, tuple(y))


def test_radius_plurality_choice():
    disc = (1, 2, 3)
    assert ex.radius_plurality_choice((0, 1, 1, 2), 0, disc, 3) == 1
    # tie between 1 and 2 with current 2 among the top: keep it
    assert ex.radius_plurality_choice((2, 1, 2, 0), 0, (1, 2), 3) == 2
    # tie between 1 and 2 with current 0 outside the top: lowest index
    assert ex.radius_plurality_choice((0, 2, 1), 0, (1, 2), 3) == 1
    assert ex.radius_plurality_choice((2,), 0, (), 3) == 2


def test_example3_small_is_one_disc():
    pp = ex.example3_small()
    assert pp.empty == [] and all(len(d) == pp.n - 1 for d in pp.disc)


def test_star_fixtures():
    g5, g6 = ex.example5(), ex.example6()
    assert g5.n == g6.n == 7 and g5.network.degree(0) == 6
    assert np.diag(g5.payoffs[0]).tolist() == [15, 10, 5]
    assert np.diag(g6.payoffs[0]).tolist() == [30, 10, 1]


def test_supermodular_fixtures():
    # index 0 encodes the value 1
    assert ex.one_minus_own((0,)) == 0 and ex.one_minus_own((1,)) == 1
    bestr = ex.supermodular_best_responder(1)
    assert bestr.tend((0,), 0) == bestr.tend((1,), 0) == 1
    flip = ex.flip_population(1)
    assert flip.tend((0,), 0) == 1 and flip.tend((1,), 0) == 0


@pytest.mark.parametrize("name", sorted(ex.REGISTRY))
def test_registry_entries_build(name):
    obj, x0, seq = ex.get(name, n=3) if name == "example4" else ex.get(name)
    pop = obj.population() if hasattr(obj, "population") else obj
    assert len(x0) == pop.n
    tr = run(pop, x0, seq, max_steps=200)
    assert tr.verdict.kind in ("equilibrium", "budget-exhausted", "cycle")


def test_registry_unknown():
    with pytest.raises(KeyError):
        ex.get("example99")
