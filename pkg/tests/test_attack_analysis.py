import random
from itertools import permutations

from hypothesis import given, settings
from hypothesis import strategies as st

from cqa_engine.attack_analysis import (ComplexityClass, attack_graph, attacked_variables,
                                        attacks_variable, classify_complexity,
                                        has_key_join_property, has_strong_cycle,
                                        initial_strong_components, keycl, unattacked_atoms)
from cqa_engine.generator import GeneratorKnobs, _free_query


def test_keycl(q1, c3):
    assert keycl(q1.atom("R"), q1) == frozenset({"x"})
    assert keycl(c3.atom("R"), c3) == frozenset({"x"})


def test_c3_attack_graph_is_complete_and_weak(c3):
    g = attack_graph(c3)
    assert len(g.edges()) == 6
    assert all(a.is_weak for a in g.edges())
    assert not has_strong_cycle(g)
    assert initial_strong_components(g) == [frozenset({"R", "S", "T"})]


def test_q1_attack_graph(q1):
    g = attack_graph(q1)
    attack = g.attacks[("R", "U")]
    assert attack.witness[0] == ("R", "y")
    assert all(a.is_weak for a in g.edges())
    assert frozenset({"R", "S", "U"}) in initial_strong_components(g)
    assert unattacked_atoms(q1) == []


def test_attacked_variables_of_saturation_example(qsat):
    attacked = attacked_variables(qsat)
    assert "z" not in attacked["S1"] and "w" not in attacked["S1"]
    assert attacked["S2"] == frozenset()


def test_classification(c3, q1, mov, strong_pair):
    assert classify_complexity(c3) is ComplexityClass.LSPACE_NOT_FO
    assert classify_complexity(q1) is ComplexityClass.LSPACE_NOT_FO
    assert classify_complexity(mov) is ComplexityClass.FO
    assert classify_complexity(strong_pair) is ComplexityClass.CONP_COMPLETE
    assert has_strong_cycle(attack_graph(strong_pair))


def test_exit_codes():
    assert [c.exit_code for c in ComplexityClass] == [0, 1, 2]


def test_key_join_property(c3, q1, mov):
    assert has_key_join_property(c3)
    assert has_key_join_property(mov)
    assert not has_key_join_property(q1)


def test_describe_mentions_strength(strong_pair):
    lines = [a.describe() for a in attack_graph(strong_pair).edges()]
    assert lines == ["R => S [strong] via R -y-> S", "S => R [strong] via S -y-> R"]


def test_attacks_variable(qsat):
    s1 = qsat.atom("S1")
    assert not attacks_variable(s1, "z", qsat)
    assert not attacks_variable(s1, "w", qsat)
    assert attacks_variable(s1, "u", qsat)
    assert not any(attacks_variable(qsat.atom("S2"), x, qsat) for x in qsat.vars)


NO_CONSISTENT = GeneratorKnobs(max_atoms=4, max_arity=3, consistent_bias=0.0)


def _attacks_by_brute_force(q, source, target):
    '''Some ordering of intermediate atoms links source to target outside K+(source).'''
    closure = keycl(source, q)
    middle = [a for a in q.atoms if a not in (source, target)]
    for r in range(len(middle) + 1):
        for path in permutations(middle, r):
            chain = (source,) + path + (target,)
            if all((a.vars & b.vars) - closure for a, b in zip(chain, chain[1:])):
                return True
    return False


def _strong_cycle_by_brute_force(g):
    names = g.query.relation_names
    for r in range(2, len(names) + 1):
        for cycle in permutations(names, r):
            edges = list(zip(cycle, cycle[1:] + cycle[:1]))
            if all(g.has_edge(a, b) for a, b in edges) and \
                    any(not g.attacks[e].is_weak for e in edges):
                return True
    return False


@settings(deadline=None, max_examples=60)
@given(seed=st.integers(0, 10**6))
def test_attacks_match_exhaustive_search(seed):
    q = _free_query(random.Random(seed), GeneratorKnobs(max_atoms=4, max_arity=3))
    g = attack_graph(q)
    for source in q.atoms:
        for target in q.atoms:
            if source == target:
                continue
            assert g.has_edge(source.name, target.name) == _attacks_by_brute_force(q, source, target)
    for attack in g.edges():
        hops = [name for name, _ in attack.witness[1:]] + [attack.target]
        assert attack.witness[0][0] == attack.source
        for (name, var), nxt in zip(attack.witness, hops):
            assert var in q.atom(name).vars & q.atom(nxt).vars
            assert var not in g.keycl[attack.source]


@settings(deadline=None, max_examples=60)
@given(seed=st.integers(0, 10**6))
def test_conp_iff_strong_cycle_of_any_length(seed):
    q = _free_query(random.Random(seed), NO_CONSISTENT)
    g = attack_graph(q)
    brute = _strong_cycle_by_brute_force(g)
    assert has_strong_cycle(g) == brute
    assert (classify_complexity(q) is ComplexityClass.CONP_COMPLETE) == brute
