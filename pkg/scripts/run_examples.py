#!/usr/bin/env python3
"""Print the verdict of every bundled fixture and of its headline property."""
from coordpop import exemplars as ex
from coordpop.analysis import (check_A_coordinating_agent, check_coordinating, check_coordinating_agent,
                               check_restrictive_coordinating, check_supermodular_utility)
from coordpop.core import run


def main():
    pop, x0, seq = ex.get("example1")
    tr = run(pop, x0, seq, max_steps=len(ex.FIG1_SEQUENCE), full_snapshots=True)
    print("example1", tr.verdict, "x(1) == x(7):", tr.state_at(1) == tr.state_at(7))

    pop, x0, seq = ex.get("example4")
    print("example4", run(pop, x0, seq, max_steps=100, detect_cycles=True).verdict,
          check_coordinating(pop).summary(), check_restrictive_coordinating(pop).summary(), sep="\n  ")

    g = ex.example5()
    print("example5", check_A_coordinating_agent(g.population(), 0, g.alphabet.index("B")).summary(g.alphabet))
    print("example6", check_coordinating_agent(ex.example6().population(), 0).summary(ex.example6().alphabet))
    print("fig7", check_coordinating_agent(ex.fig7_pgg().population(), ex.FIG7_FOCAL).summary(ex.fig7_pgg().alphabet))

    print("u = 1 - x_i", check_supermodular_utility(ex.one_minus_own, 1, 0).summary())
    print("its best responder", check_coordinating(ex.supermodular_best_responder()).summary())

    pp = ex.example3_small()
    print("example3 (five agents)", check_restrictive_coordinating(pp.population()).summary(pp.population().alphabet))

    pp = ex.example2(100, seed=1)
    comps = ex.nn_digraph_structure(pp)
    print("example2", len(comps), "components, cycle lengths", sorted({len(c.cycle) for c in comps}))


if __name__ == "__main__":
    main()
