import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqa_engine.core import Constant, Mode, RelationSchema, parse_database, parse_query
from cqa_engine.errors import PreconditionError, SaturationError
from cqa_engine.fd_engine import FunctionalDependency, entails, fds_of
from cqa_engine.generator import GeneratorKnobs, random_database
from cqa_engine.saturation import (EMPTY_KEY, fd_atom, internal_fds, is_saturated, purify,
                                   purify_all, saturate)

TWO_EMBEDDINGS = """
    S1(1 | a).  S2(a | p).   R1(1 | b).  R2(b | p).  T1(a | c).   T2(c | p).
    S1(1 | a2). S2(a2 | q).  R2(b | q).  T1(a2 | c2). T2(c2 | q).
"""

ONE_EMBEDDING = """
    S1(1 | a).  S2(a | p).   R1(1 | b).  R2(b | p).  T1(a | c).   T2(c | p).
"""


def _z_to_w(qsat):
    return next(ifd for ifd in internal_fds(qsat) if ifd.lhs == {'z'} and ifd.target == 'w')


def test_internal_fd_with_proof(qsat):
    ifd = _z_to_w(qsat)
    assert str(ifd.proof) == "<S1, S2>"
    assert not is_saturated(qsat)


def test_saturate_adds_consistent_atoms(qsat):
    result = saturate(qsat)
    assert result.changed
    assert {(tuple(sorted(s.lhs)), s.target) for s in result.added} == {(('z',), 'w'),
                                                                        (('u',), 'w')}
    assert [s.atom.name for s in result.added] == ["N_sat_1", "N_sat_2"]
    assert all(s.atom.mode is Mode.C for s in result.added)
    assert is_saturated(result.query)
    sigma = fds_of(result.query.catoms)
    assert entails(sigma, FunctionalDependency.of({'z'}, {'w'}))


def test_saturated_queries_are_left_alone(c3, q1):
    assert not saturate(c3).changed
    assert is_saturated(q1)


def test_fd_atom_with_empty_lhs():
    atom = fd_atom("N", [], "x")
    assert atom.key_terms == (EMPTY_KEY,)
    assert atom.mode is Mode.C


def _fresh():
    return RelationSchema('N', 2, 1, Mode.C)


def test_purify_drops_disagreeing_host_blocks(qsat):
    db = parse_database(TWO_EMBEDDINGS, qsat.schemas)
    purified = purify(db, qsat, ({'z'}, 'w'), qsat.atom("S1"), _fresh())
    assert not purified.facts_of("S1")
    assert not purified.facts_of("N")
    assert len(purified) == len(db) - 2


def test_purify_records_the_dependency(qsat):
    db = parse_database(ONE_EMBEDDING, qsat.schemas)
    purified = purify(db, qsat, ({'z'}, 'w'), qsat.atom("S1"), _fresh())
    assert [(f.key_values, f.value_values) for f in purified.facts_of("N")] == [
        ((Constant.number(1),), (Constant.text("p"),))]


def test_purify_rejects_bad_arguments(qsat):
    db = parse_database(ONE_EMBEDDING, qsat.schemas)
    with pytest.raises(PreconditionError):
        purify(db, qsat, ({'w'}, 'z'), qsat.atom("S1"), _fresh())
    with pytest.raises(SaturationError):
        purify(db, qsat, ({'z'}, 'w'), qsat.atom("S1"), RelationSchema('S2', 2, 1, Mode.C))
    with pytest.raises(SaturationError):
        purify(db, qsat, ({'z'}, 'w'), qsat.atom("S1"), RelationSchema('N', 2, 1, Mode.I))


def test_purify_all_keeps_certain_answer(qsat):
    result = saturate(qsat)
    db = parse_database(ONE_EMBEDDING, qsat.schemas)
    purified = purify_all(db, qsat, result)
    assert {"N_sat_1", "N_sat_2"} <= set(purified.schemas)
    assert len(purified) == len(db) + 2


QSAT = "q :- S1(z | u), S2(u | w), R1(z | u2), R2(u2 | w), T1(u | v), T2(v | w)."


@settings(deadline=None, max_examples=40)
@given(seed=st.integers(0, 10**6))
def test_purification_is_idempotent(seed):
    q = parse_query(QSAT)
    db = random_database(random.Random(seed), q, GeneratorKnobs(domain_size=3, embeddings=4))
    once = purify(db, q, ({'z'}, 'w'), q.atom("S1"), _fresh())
    twice = purify(once.drop_relations(["N"]), q, ({'z'}, 'w'), q.atom("S1"), _fresh())
    assert twice == once
    assert purify(db, q, ({'z'}, 'w'), q.atom("S1"), _fresh(), fixpoint=True) == once


@settings(deadline=None, max_examples=25)
@given(seed=st.integers(0, 10**6))
def test_purify_all_single_pass_matches_fixpoint(seed):
    q = parse_query(QSAT)
    db = random_database(random.Random(seed), q, GeneratorKnobs(domain_size=3, embeddings=4))
    result = saturate(q)
    assert purify_all(db, q, result) == purify_all(db, q, result, fixpoint=True)
