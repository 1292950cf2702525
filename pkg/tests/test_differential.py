import random
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqa_engine.attack_analysis import (ComplexityClass, attack_graph, classify_complexity,
                                        has_key_join_property, has_strong_cycle)
from cqa_engine.codegen import compose_pipeline, emit_garbage_program
from cqa_engine.core import ConstantOrder
from cqa_engine.datalog import evaluate, validate
from cqa_engine.errors import OracleInfeasibleError, PreconditionError
from cqa_engine.garbage import garbage_oracle, maximal_garbage_set
from cqa_engine.generator import (GeneratorKnobs, _free_query, random_cycle_instance,
                                  random_instance, random_query)
from cqa_engine.mgraph import find_mcycle
from cqa_engine.pipeline import (certain_answer_direct, certain_answer_oracle,
                                 differential_check, reduce_once)
from cqa_engine.saturation import purify_all, saturate

CORPUS = 1000


def _saturated_instance(seed):
    q, db = random_instance(seed)
    sat = saturate(q)
    return q, db, sat.query, purify_all(db.restrict(q.relation_names), q, sat)


def _cycle_of(q):
    try:
        return find_mcycle(q)
    except PreconditionError:
        return None


def _check_garbage(seed):
    _, _, q, db = _saturated_instance(seed)
    cycle = _cycle_of(q)
    if cycle is None:
        return
    direct = maximal_garbage_set(q, cycle, db).garbage_blocks
    program = emit_garbage_program(q, cycle)
    store = evaluate(program, db)
    derived = {(name, key) for name in cycle.names
               for key in store.get(program.manifest[f"del.{name}"], set())}
    assert derived == set(direct), f"seed {seed}"
    try:
        assert garbage_oracle(q, cycle.atoms, db) == direct, f"seed {seed}"
    except OracleInfeasibleError:
        pass


def _check_saturation(seed):
    q, db, saturated, purified = _saturated_instance(seed)
    assert not has_strong_cycle(attack_graph(saturated)), f"seed {seed}"
    try:
        before = certain_answer_oracle(q, db)
        after = certain_answer_oracle(saturated, purified)
    except OracleInfeasibleError:
        return
    assert before == after, f"seed {seed}"


def _check_reduction(q, cycle, db, label):
    clean = db.difference(maximal_garbage_set(q, cycle, db).garbage_facts)
    reduced_q, reduced_db = reduce_once(q, cycle, clean)
    assert not has_strong_cycle(attack_graph(reduced_q)), label
    assert len(reduced_q.iatoms) < len(q.iatoms), label
    try:
        before = certain_answer_oracle(q, db)
        after = certain_answer_oracle(reduced_q, reduced_db)
    except OracleInfeasibleError:
        return
    assert before == after, label


def _check_order(seed):
    q, db = random_instance(seed)
    up = certain_answer_direct(q, db, ConstantOrder.ASCENDING).answer
    down = certain_answer_direct(q, db, ConstantOrder.DESCENDING).answer
    assert up == down, f"seed {seed}"
    assert differential_check(q, db, order=ConstantOrder.DESCENDING).agree, f"seed {seed}"


@settings(deadline=None, max_examples=40)
@given(seed=st.integers(0, 10 ** 6))
def test_three_evaluators_agree(seed):
    q, db = random_instance(seed)
    result = differential_check(q, db)
    assert result.agree, f"seed {seed}: {result}\n{q}"


@settings(deadline=None, max_examples=25)
@given(seed=st.integers(0, 10 ** 6))
def test_builtin_and_faithful_programs_agree(seed):
    q, db = random_instance(seed)
    faithful = differential_check(q, db, faithful=True)
    builtin = differential_check(q, db, faithful=False)
    assert faithful.program == builtin.program


@settings(deadline=None, max_examples=25)
@given(seed=st.integers(0, 10 ** 6))
def test_answer_independent_of_constant_order(seed):
    _check_order(seed)


@settings(deadline=None, max_examples=30)
@given(seed=st.integers(0, 10 ** 6))
def test_garbage_program_matches_direct_fixpoint(seed):
    _check_garbage(seed)


@settings(deadline=None, max_examples=30)
@given(seed=st.integers(0, 10 ** 6))
def test_saturation_preserves_answers(seed):
    _check_saturation(seed)


@settings(deadline=None, max_examples=20)
@given(seed=st.integers(0, 10 ** 6))
def test_reduction_preserves_answers(seed):
    q, cycle, db = random_cycle_instance(seed)
    _check_reduction(q, cycle, db, f"seed {seed}")


@settings(deadline=None, max_examples=30)
@given(seed=st.integers(0, 10 ** 6))
def test_compiled_programs_validate(seed):
    q, _ = random_instance(seed)
    report = validate(compose_pipeline(q).program)
    assert report.ok, report.errors


@pytest.mark.slow
def test_key_join_queries_never_conp():
    rng = random.Random(17)
    knobs = GeneratorKnobs()
    checked = 0
    while checked < 200:
        q = _free_query(rng, knobs)
        if not has_key_join_property(q):
            continue
        checked += 1
        assert classify_complexity(q) is not ComplexityClass.CONP_COMPLETE, str(q)


@pytest.mark.slow
def test_many_seeded_instances():
    started = time.perf_counter()
    for seed in range(CORPUS):
        q, db = random_instance(seed)
        result = differential_check(q, db)
        assert result.agree, f"seed {seed}: {result}\n{q}"
    elapsed = time.perf_counter() - started
    assert elapsed < 600, f"{CORPUS} instances took {elapsed:.0f}s"


@pytest.mark.slow
def test_garbage_matches_program_and_oracle_over_corpus():
    for seed in range(CORPUS):
        _check_garbage(seed)
        q, cycle, db = random_cycle_instance(seed)
        direct = maximal_garbage_set(q, cycle, db).garbage_blocks
        if sum(1 for b in db.blocks if b[0] in cycle.names) <= 12:
            assert garbage_oracle(q, cycle.atoms, db) == direct, f"seed {seed}"


@pytest.mark.slow
def test_saturation_and_reduction_over_corpus():
    for seed in range(CORPUS):
        _check_saturation(seed)
        _, _, q, db = _saturated_instance(seed)
        cycle = _cycle_of(q)
        if cycle is not None:
            _check_reduction(q, cycle, db, f"seed {seed}")
        q, cycle, db = random_cycle_instance(seed)
        _check_reduction(q, cycle, db, f"cycle seed {seed}")


@pytest.mark.slow
def test_answer_independent_of_constant_order_over_corpus():
    for seed in range(CORPUS):
        _check_order(seed)


@pytest.mark.slow
def test_key_join_queries_compile():
    rng = random.Random(23)
    knobs = GeneratorKnobs(key_join_bias=1.0, mcycle_bias=0.0)
    for _ in range(200):
        compose_pipeline(random_query(rng, knobs))
