import random

from cqa_engine.attack_analysis import ComplexityClass, classify_complexity, has_key_join_property
from cqa_engine.core import parse_database, repair_count
from cqa_engine.generator import (GeneratorKnobs, minimize_counterexample, random_database,
                                  random_instance, random_kpartite, random_query)


def test_instances_are_reproducible():
    q1, db1 = random_instance(11)
    q2, db2 = random_instance(11)
    assert q1 == q2 and db1 == db2


def test_queries_avoid_conp():
    rng = random.Random(3)
    for _ in range(50):
        assert classify_complexity(random_query(rng)) is not ComplexityClass.CONP_COMPLETE


def test_key_join_bias():
    rng = random.Random(5)
    knobs = GeneratorKnobs(key_join_bias=1.0, mcycle_bias=0.0)
    for _ in range(30):
        assert has_key_join_property(random_query(rng, knobs))


def test_databases_respect_knobs():
    knobs = GeneratorKnobs(max_block_size=2, repair_cap=64)
    rng = random.Random(9)
    for _ in range(20):
        q = random_query(rng, knobs)
        db = random_database(rng, q, knobs)
        assert repair_count(db) <= 64
        assert all(len(block) <= 2 for block in db.blocks.values())
        assert all(f.name in q.relation_names for f in db)


def test_random_kpartite_is_valid():
    rng = random.Random(7)
    for k in (2, 3, 4):
        g = random_kpartite(rng, k, 12)
        g.validate()
        assert g.graph.number_of_edges() >= k


def test_minimize_counterexample(c3, dbgt):
    def has_r_fact(q, db):
        return bool(db.facts_of("R"))

    shrunk = minimize_counterexample(c3, dbgt, has_r_fact)
    assert len(shrunk) == 1
    assert shrunk.facts <= dbgt.facts


def test_minimize_keeps_minimal_input(c3):
    db = parse_database("R(a | b).", c3.schemas)
    assert minimize_counterexample(c3, db, lambda q, d: len(d) == 1) == db
