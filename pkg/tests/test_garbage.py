import networkx as nx
from hypothesis import given, settings
from hypothesis import strategies as st

from cqa_engine.core import Constant, ConstantOrder, parse_database
from cqa_engine.errors import OracleInfeasibleError
from cqa_engine.garbage import (garbage_oracle, hook_graph_after, is_garbage_set,
                                maximal_garbage_set, relevant_quotient)
from cqa_engine.generator import GeneratorKnobs, random_cycle_instance
from cqa_engine.longcycle import longcycle
from cqa_engine.mgraph import chook_graph, one_embeddings
from cqa_engine.pipeline import certain_answer_oracle


def _labels(blocks):
    return {(name, tuple(c.label() for c in key)) for name, key in blocks}


def test_guided_tour_is_all_garbage(c3, c3_cycle, dbgt):
    report = maximal_garbage_set(c3, c3_cycle, dbgt)
    assert report.garbage_facts == dbgt.facts
    assert _labels(report.garbage_blocks) == {
        ("R", ("a1",)), ("R", ("a2",)), ("S", ("b1",)), ("S", ("b2",)),
        ("T", ("c1",)), ("T", ("c2",))}
    assert report.seeds['n_embedding'] == report.garbage_blocks
    assert report.surviving_components == []
    assert "facts=9" in report.summary()


def test_guided_tour_quotient_has_long_cycle(c3, c3_cycle, dbgt):
    relevant, _ = one_embeddings(c3, c3_cycle, dbgt)
    quotient = relevant_quotient(c3_cycle, relevant)
    assert longcycle(quotient)


def test_no_garbage_in_rs(rs, rs_cycle, rs_db):
    report = maximal_garbage_set(rs, rs_cycle, rs_db)
    assert report.size == 0
    sizes = sorted(len(c.facts) for c in report.surviving_components)
    assert sizes == [2, 6]
    ids = [c.identifier for c in report.surviving_components]
    assert ids == [(Constant.text("a"),), (Constant.text("c"),)]
    assert [len(c.embeddings) for c in report.surviving_components] == [3, 1]


def test_component_names_follow_order(rs, rs_cycle, rs_db):
    report = maximal_garbage_set(rs, rs_cycle, rs_db, ConstantOrder.DESCENDING)
    ids = [c.identifier for c in report.surviving_components]
    assert ids == [(Constant.text("c"),), (Constant.text("b"),)]


def test_oracle_agrees(c3, c3_cycle, dbgt, rs, rs_cycle, rs_db):
    assert garbage_oracle(c3, c3_cycle.atoms, dbgt) == \
        maximal_garbage_set(c3, c3_cycle, dbgt).garbage_blocks
    assert garbage_oracle(rs, rs_cycle.atoms, rs_db) == frozenset()


def test_dangling_fact_is_garbage(c3, c3_cycle):
    db = parse_database("R(a | b). S(b | c). T(c | a). R(a2 | b2).", c3.schemas)
    report = maximal_garbage_set(c3, c3_cycle, db)
    assert _labels(report.garbage_blocks) == {("R", ("a2",))}
    assert is_garbage_set(c3, c3_cycle.atoms, db, sorted(report.garbage_blocks))
    assert len(report.surviving_components) == 1


def test_hook_graph_after_removal(c3, c3_cycle, dbgt, rs, rs_cycle, rs_db):
    report = maximal_garbage_set(c3, c3_cycle, dbgt)
    assert hook_graph_after(c3, c3_cycle, dbgt, report).facts() == []
    report = maximal_garbage_set(rs, rs_cycle, rs_db)
    after = hook_graph_after(rs, rs_cycle, rs_db, report)
    assert after.edges() == chook_graph(rs, rs_cycle, rs_db).edges()


CYCLES = GeneratorKnobs(max_atoms=3, max_arity=3, noise=4)


@settings(deadline=None, max_examples=40)
@given(seed=st.integers(0, 10**6))
def test_garbage_removal_leaves_only_cycle_edges(seed):
    q, cycle, db = random_cycle_instance(seed, CYCLES)
    report = maximal_garbage_set(q, cycle, db)
    after = hook_graph_after(q, cycle, db, report)
    for a, b in after.edges():
        assert nx.has_path(after.graph, b, a)
    rest = db.difference(report.garbage_facts)
    assert maximal_garbage_set(q, cycle, rest).garbage_blocks == frozenset()


@settings(deadline=None, max_examples=40)
@given(seed=st.integers(0, 10**6))
def test_garbage_is_closed_under_strong_components(seed):
    q, cycle, db = random_cycle_instance(seed, CYCLES)
    report = maximal_garbage_set(q, cycle, db)
    chg = chook_graph(q, cycle, db)
    for component in nx.strongly_connected_components(chg.graph):
        assert len({f in report.garbage_facts for f in component}) == 1


@settings(deadline=None, max_examples=30)
@given(seed=st.integers(0, 10**6))
def test_garbage_removal_keeps_the_certain_answer(seed):
    q, cycle, db = random_cycle_instance(seed, CYCLES)
    report = maximal_garbage_set(q, cycle, db)
    assert certain_answer_oracle(q, db) == \
        certain_answer_oracle(q, db.difference(report.garbage_facts))
    try:
        assert garbage_oracle(q, cycle.atoms, db) == report.garbage_blocks
    except OracleInfeasibleError:
        pass
