import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqa_engine.errors import InvalidInstanceError, OracleInfeasibleError
from cqa_engine.generator import random_kpartite
from cqa_engine.longcycle import (KPartiteGraph, brute_longcycle, k_cycles,
                                  kcycle_intersection_graph, longcycle)


def _bipartite(edges):
    parts = {v: (0 if v.startswith('a') else 1) for e in edges for v in e}
    both_ways = set(edges) | {(v, u) for u, v in edges}
    return KPartiteGraph.from_edges(2, parts, sorted(both_ways))


def test_no_long_cycle():
    g = _bipartite([('a0', 'b0'), ('a0', 'b1'), ('a1', 'b1')])
    assert not longcycle(g)
    assert not brute_longcycle(g)


def test_four_cycle():
    g = _bipartite([('a0', 'b0'), ('a0', 'b1'), ('a1', 'b1'), ('a1', 'b0')])
    assert longcycle(g)
    assert brute_longcycle(g)


def test_triangles():
    parts = {'r0': 0, 's0': 1, 't0': 2, 'r1': 0, 's1': 1, 't1': 2}
    edges = [('r0', 's0'), ('s0', 't0'), ('t0', 'r0'), ('r1', 's1'), ('s1', 't1'), ('t1', 'r1')]
    g = KPartiteGraph.from_edges(3, parts, edges)
    assert len(k_cycles(g)) == 2
    assert kcycle_intersection_graph(g).number_of_edges() == 0
    assert not longcycle(g, 3)
    g = KPartiteGraph.from_edges(3, parts, edges + [('r0', 's1'), ('s1', 't0'),
                                                   ('r1', 's0'), ('s0', 't1')])
    assert longcycle(g, 3)


def test_invalid_instances():
    with pytest.raises(InvalidInstanceError):
        longcycle(KPartiteGraph.from_edges(2, {'a': 0, 'b': 0}, [('a', 'b'), ('b', 'a')]))
    with pytest.raises(InvalidInstanceError):
        longcycle(KPartiteGraph.from_edges(2, {'a': 0, 'b': 1}, [('a', 'b')]))
    with pytest.raises(InvalidInstanceError):
        KPartiteGraph.from_edges(2, {'a': 0}, [('a', 'b')])
    with pytest.raises(InvalidInstanceError):
        longcycle(_bipartite([('a0', 'b0')]), 3)


def test_brute_force_cap():
    g = random_kpartite(random.Random(1), 2, 20, cycles=30)
    with pytest.raises(OracleInfeasibleError):
        brute_longcycle(g, cap=4)


@settings(deadline=None, max_examples=60)
@given(seed=st.integers(0, 10 ** 6), k=st.integers(2, 4), size=st.integers(4, 12))
def test_matches_brute_force(seed, k, size):
    g = random_kpartite(random.Random(seed), k, size)
    assert longcycle(g) == brute_longcycle(g, cap=12)


@pytest.mark.slow
def test_matches_brute_force_on_many_instances():
    rng = random.Random(2024)
    for _ in range(500):
        k = rng.randint(2, 4)
        g = random_kpartite(rng, k, rng.randint(4, 12))
        assert longcycle(g) == brute_longcycle(g, cap=12)
