import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqa_engine.core import parse_database, parse_query
from cqa_engine.errors import PreconditionError
from cqa_engine.generator import GeneratorKnobs, random_cycle_instance
from cqa_engine.mgraph import (MCycle, block_quotient, check_hook_lemma, chook_graph, find_mcycle,
                               hook_graph, m_graph, n_embeddings, one_embeddings)


def test_m_graph_of_triangle(c3):
    mg = m_graph(c3)
    assert mg.edges == {("R", "S"), ("S", "T"), ("T", "R")}


def test_m_graph_uses_consistent_atoms(q1):
    mg = m_graph(q1)
    assert len(mg.edges) == 16
    assert mg.has_edge("S", "U")
    assert not mg.has_edge("S", "R")


def test_find_mcycle(c3, q1):
    assert find_mcycle(c3).names == ("R", "S", "T")
    assert find_mcycle(q1).names == ("S", "U")


def test_find_mcycle_needs_all_atoms_attacked():
    q = parse_query("q :- R(x | y), S(y | x), T(u | x).")
    with pytest.raises(PreconditionError):
        find_mcycle(q)


def test_mcycle_validation(c3):
    with pytest.raises(PreconditionError):
        MCycle.of(c3, ["R", "T", "S"])
    with pytest.raises(PreconditionError):
        MCycle.of(c3, ["R"])
    assert str(MCycle.of(c3, ["S", "T", "R"])) == "S -> T -> R -> S"


def test_chook_graph_of_guided_tour(c3, c3_cycle, dbgt):
    chg = chook_graph(c3, c3_cycle, dbgt)
    assert len(chg.edges()) == 15
    assert len(chg.facts()) == 9
    assert check_hook_lemma(chg, dbgt).holds
    assert check_hook_lemma(hook_graph(c3, dbgt), dbgt).holds


def test_block_quotient_has_one_long_cycle(c3, c3_cycle, dbgt):
    qg = block_quotient(chook_graph(c3, c3_cycle, dbgt))
    assert len(qg.blocks()) == 6
    assert len(qg.edges()) == 9
    six = [c for c in nx.simple_cycles(qg.graph) if len(c) == 6]
    assert len(six) == 1


def test_block_quotient_needs_cycle(c3, dbgt):
    with pytest.raises(PreconditionError):
        block_quotient(hook_graph(c3, dbgt))


def test_embeddings_of_guided_tour(c3, c3_cycle, dbgt):
    relevant, irrelevant = one_embeddings(c3, c3_cycle, dbgt)
    assert len(relevant) == 4
    assert irrelevant == []
    assert all(e.facts[0].name == "R" for e in relevant)
    two = n_embeddings(c3, c3_cycle, dbgt, 2)
    assert len(two) == 1
    assert len(two[0].blocks) == 6
    assert n_embeddings(c3, c3_cycle, dbgt, 3) == []


def test_irrelevant_embeddings(rs, rs_cycle, rs_db):
    relevant, irrelevant = one_embeddings(rs, rs_cycle, rs_db)
    assert len(relevant) == 4
    assert irrelevant == []
    db = parse_database("""
        R(a | 1, alpha). R(a | 1, beta). S(1 | a, alpha). S(1 | a, beta).
    """, rs.schemas)
    relevant, irrelevant = one_embeddings(rs, rs_cycle, db)
    assert len(relevant) == 2 and len(irrelevant) == 2
    assert all(e.relevant is False for e in irrelevant)


@settings(deadline=None, max_examples=40)
@given(seed=st.integers(0, 10**6))
def test_chook_graph_is_k_partite_along_the_cycle(seed):
    q, cycle, db = random_cycle_instance(seed, GeneratorKnobs(max_atoms=3, max_arity=3))
    chg = chook_graph(q, cycle, db)
    k = cycle.k
    for a, b in chg.edges():
        assert chg.graph.nodes[b]['part'] == (chg.graph.nodes[a]['part'] + 1) % k
    for c in nx.simple_cycles(chg.graph, length_bound=3 * k):
        assert len(c) % k == 0
