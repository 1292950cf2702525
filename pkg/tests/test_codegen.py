import pytest

from cqa_engine.codegen import (NameAllocator, compose_pipeline, emit_garbage_program,
                                emit_reduction_program, pick_unattacked)
from cqa_engine.core import Constant, parse_database, parse_query
from cqa_engine.datalog import evaluate, parse_program, print_program, validate
from cqa_engine.errors import ClassificationRefusedError, PreconditionError
from cqa_engine.garbage import maximal_garbage_set


def t(*labels):
    return tuple(Constant.of(v) for v in labels)


def _deleted_keys(program, db, names):
    store = evaluate(program, db)
    return {name: store.get(program.manifest[f"del.{name}"], set()) for name in names}


def test_name_allocator():
    names = NameAllocator(["R"])
    assert names.fresh("R") == "R__s1"
    assert names.fresh("R") == "R__s2"
    assert names.fresh("del_R") == "del_R"


@pytest.mark.parametrize("faithful", [True, False])
def test_garbage_program_matches_direct(c3, c3_cycle, dbgt, faithful):
    program = emit_garbage_program(c3, c3_cycle, faithful)
    assert validate(program).ok, validate(program).errors
    deleted = _deleted_keys(program, dbgt, c3_cycle.names)
    direct = maximal_garbage_set(c3, c3_cycle, dbgt).garbage_blocks
    assert {(name, key) for name, keys in deleted.items() for key in keys} == set(direct)


def test_garbage_program_keeps_partial_database(c3, c3_cycle):
    db = parse_database("R(a | b). S(b | c). T(c | a). R(a2 | b2).", c3.schemas)
    deleted = _deleted_keys(emit_garbage_program(c3, c3_cycle), db, c3_cycle.names)
    assert deleted == {"R": {t("a2")}, "S": set(), "T": set()}


def test_reduction_program_tables(rs, rs_cycle, rs_db):
    program, plan = emit_reduction_program(rs, rs_cycle)
    assert validate(program).ok, validate(program).errors
    assert plan.t_atom.name == "T_0"
    store = evaluate(program, rs_db)
    rel = {name[len("rel."):]: pred for name, pred in program.manifest.items()
           if name.startswith("rel.")}
    assert store[rel["T_0"]] == {t("a", "a", 1, "alpha"), t("a", "b", 1, "beta"),
                                 t("a", "b", 2, "beta"), t("c", "c", 3, "beta")}
    assert store[rel["N_red_0_0"]] == {t("a", "a"), t("b", "a"), t("c", "c")}
    assert store[rel["N_red_0_1"]] == {t(1, "a"), t(2, "a"), t(3, "c")}
    assert str(plan.new_query) == program.manifest["reduced"]


@pytest.mark.parametrize("faithful", [True, False])
def test_pipeline_answers(c3, dbgt, q1, dbq1, rs, rs_db, faithful):
    assert not compose_pipeline(c3, faithful).answer(dbgt)
    assert not compose_pipeline(q1, faithful).answer(dbq1)
    assert compose_pipeline(rs, faithful).answer(rs_db)


def test_pipeline_program_is_symmetric_stratified(c3, q1):
    for q in (c3, q1):
        compiled = compose_pipeline(q)
        report = validate(compiled.program)
        assert report.ok, report.errors
        assert compiled.program.manifest["goal"] == compiled.goal
        assert int(compiled.program.manifest["stages"]) == len(compiled.stages)
    assert len(compose_pipeline(q1).stages) >= 2


def test_rendered_pipeline_reparses(c3, dbgt):
    compiled = compose_pipeline(c3)
    program = parse_program(compiled.render())
    assert program.goal == compiled.goal
    assert program.strata == compiled.program.strata
    assert print_program(program) == compiled.render()


def test_first_order_query(mov):
    compiled = compose_pipeline(mov)
    assert compiled.stages[0].startswith("ground Movies")
    db = parse_database("""
        Movies(m1 | "Psycho", "1960", hitch).
        Movies(m2 | "Birds", "1963", hitch).
        Directors(hitch | "Hitchcock", 1899).
    """, mov.schemas)
    assert compiled.answer(db)
    other = db.union(parse_database('Movies(m2 | "Marnie", "1964", hitch).', mov.schemas))
    assert not compiled.answer(other)


def test_pick_unattacked(mov, c3):
    assert pick_unattacked(mov).name == "Movies"
    assert pick_unattacked(c3) is None


def test_refuses_conp(strong_pair):
    with pytest.raises(ClassificationRefusedError) as err:
        compose_pipeline(strong_pair)
    assert err.value.complexity.value == "CONP_COMPLETE"


def test_reserved_variable_names():
    with pytest.raises(PreconditionError):
        compose_pipeline(parse_query("q :- R(x__0 | y)."))


def test_embedding_rules_chain_hook_edges(c3, c3_cycle):
    program = emit_garbage_program(c3, c3_cycle)
    hooks = {r.head.predicate for r in program if r.head.predicate.startswith("Hook")}
    assert hooks == {"Hook0", "Hook1", "Hook2"}
    lengths = {"Any1Emb": 3, "NEmb2": 6}
    for rule in program:
        if rule.head.predicate not in lengths:
            continue
        body = [lit.predicate for lit in rule.positive_literals]
        assert not set(body) & set(c3.relation_names)
        assert sum(p in hooks for p in body) == lengths.pop(rule.head.predicate)
    assert lengths == {}
