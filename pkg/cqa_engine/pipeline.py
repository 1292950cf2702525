#!/usr/bin/env python3
"""
Certain-Answer Pipeline

Direct (interpreted) evaluation of CQA(q) that follows the recursion of the compiled program:

1. restrict the database to the relations of q, saturate q and purify the database;
2. with no mode-i atom left, q is evaluated on the now consistent remainder;
3. with an unattacked mode-i atom R, q is certain iff some R-block matching the key pattern of
   R has every fact matching R with a certain residual query;
4. otherwise an M-cycle is taken, its maximal garbage set removed, and the cycle reduced to
   one T atom plus mode-c N atoms, which strictly lowers the number of mode-i atoms.

Also holds the brute-force repair oracle and the three-way differential check used by the
`diff` command.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from networkx.utils import UnionFind

from .attack_analysis import ComplexityClass, attack_graph, classify_complexity, has_strong_cycle
from .codegen.pipeline_program import compose_pipeline, pick_unattacked
from .codegen.reduction_program import emit_reduction_program, reduction_plan
from .core.database import Database, edb_to_database, enumerate_repairs, sort_blocks
from .core.evaluation import iter_embeddings, satisfies
from .core.schema import Atom, Fact, Query
from .core.terms import Constant, ConstantOrder
from .datalog.evaluator import evaluate
from .errors import OracleInfeasibleError, PreconditionError, ReductionError
from .garbage import maximal_garbage_set
from .mgraph import MCycle, find_mcycle
from .saturation import purify_all, saturate

logger = logging.getLogger(__name__)


def certain_answer_oracle(q: Query, db: Database, cap: Optional[int] = None) -> bool:
    '''True iff every repair of db satisfies q; raises OracleInfeasibleError above `cap`.'''
    relevant = db.restrict(q.relation_names)
    return all(satisfies(q, repair) for repair in enumerate_repairs(relevant, cap))


@dataclass
class TraceStep:
    stage: str
    depth: int
    details: Dict[str, str] = field(default_factory=dict)

    def render(self) -> str:
        parts = [f"depth={self.depth}"] + [f"{k}={v}" for k, v in self.details.items()]
        return f"{self.stage}: " + ' '.join(parts)


@dataclass
class CertainAnswerTrace:
    answer: bool
    steps: List[TraceStep] = field(default_factory=list)
    oracle_fallback: bool = False

    def render(self) -> str:
        lines = [step.render() for step in self.steps]
        lines.append(f"answer: value={'true' if self.answer else 'false'} "
                     f"oracle_fallback={'true' if self.oracle_fallback else 'false'}")
        return '\n'.join(lines) + '\n'

    def stages(self, name: str) -> List[TraceStep]:
        return [s for s in self.steps if s.stage == name]


def reduce_once(q: Query, cycle: MCycle, db: Database, depth: int = 0,
                order: ConstantOrder = ConstantOrder.ASCENDING) -> Tuple[Query, Database]:
    '''Replace the facts of C by one T fact per embedding plus consistent N_i facts.

    Embeddings sharing the key of some F_i fall in the same component; the component is named
    by its least F_0 key under `order`. The garbage of C must already be removed.
    '''
    plan = reduction_plan(q, cycle, depth)
    embeddings = list(iter_embeddings(q, db))
    roots = UnionFind(theta.values_of(cycle.atoms[0].key_terms) for theta in embeddings)
    groups: Dict[Tuple[int, Tuple[Constant, ...]], List[Tuple[Constant, ...]]] = {}
    for theta in embeddings:
        root = theta.values_of(cycle.atoms[0].key_terms)
        for i, atom in enumerate(cycle.atoms):
            groups.setdefault((i, theta.values_of(atom.key_terms)), []).append(root)
    for members in groups.values():
        roots.union(*members)

    names: Dict[Tuple[Constant, ...], Tuple[Constant, ...]] = {}
    for component in roots.to_sets():
        ident = min(component, key=order.key)
        for member in component:
            names[member] = ident

    t_schema = plan.t_atom.relation
    added = set()
    for theta in embeddings:
        ident = names[theta.values_of(cycle.atoms[0].key_terms)]
        added.add(Fact(t_schema, ident, theta.values_of(plan.t_atom.value_terms)))
        for atom, n_atom in zip(cycle.atoms, plan.n_atoms):
            added.add(Fact(n_atom.relation, theta.values_of(atom.key_terms), ident))
    reduced = db.drop_relations(cycle.names).union(added)
    logger.debug(f"Reduced {cycle}: {len(embeddings)} embedding(s) in "
                 f"{len(set(names.values()))} component(s)")
    return plan.new_query, reduced


def program_reduction(q: Query, cycle: MCycle, db: Database, faithful: bool = True,
                      order: ConstantOrder = ConstantOrder.ASCENDING) -> Tuple[Query, Database]:
    '''reduce_once as computed by the generated garbage and reduction rules.'''
    program, plan = emit_reduction_program(q, cycle, faithful)
    store = evaluate(program, db, order)
    reduced = {name[len('rel.'):]: store.get(pred, set())
               for name, pred in program.manifest.items() if name.startswith('rel.')}
    kept = db.restrict(q.relation_names).drop_relations(cycle.names)
    return plan.new_query, kept.union(edb_to_database(reduced, plan.new_query.schemas).facts)


class _DirectEvaluator:
    def __init__(self, order: ConstantOrder):
        self.order = order
        self.steps: List[TraceStep] = []

    def record(self, stage: str, depth: int, **details: object) -> None:
        self.steps.append(TraceStep(stage, depth, {k: str(v) for k, v in details.items()}))

    def certain(self, q: Query, db: Database, depth: int) -> bool:
        db = db.restrict(q.relation_names)
        sat = saturate(q)
        if sat.changed:
            before = len(db)
            db = purify_all(db, q, sat)
            q = sat.query
            self.record('saturate', depth, added=len(sat.added), facts_before=before,
                        facts_after=len(db))
        if not q.iatoms:
            answer = satisfies(q, db)
            self.record('evaluate', depth, atoms=len(q), facts=len(db),
                        result=str(answer).lower())
            return answer
        atom = pick_unattacked(q)
        if atom is not None:
            return self.ground(q, atom, db, depth)

        cycle = find_mcycle(q)
        if cycle is None:
            raise PreconditionError(f"{q.name} has attacked mode-i atoms but no M-cycle")
        report = maximal_garbage_set(q, cycle, db, self.order)
        db = db.difference(report.garbage_facts)
        self.record('garbage', depth, cycle='->'.join(cycle.names),
                    blocks=len(report.garbage_blocks), facts=report.size, remaining=len(db))
        logger.info(f"Garbage for {cycle}: {report.summary()}")

        reduced_q, reduced_db = reduce_once(q, cycle, db, depth, self.order)
        strong = has_strong_cycle(attack_graph(reduced_q))
        decreased = len(reduced_q.iatoms) < len(q.iatoms)
        if strong or not decreased:
            raise ReductionError(f"reducing {cycle} gave {reduced_q}: strong_cycle={strong} "
                                 f"mode_i_decreased={decreased}")
        self.record('reduce', depth, mode_i=f"{len(q.iatoms)}->{len(reduced_q.iatoms)}",
                    strong_cycle=str(strong).lower(), facts=len(reduced_db))
        return self.certain(reduced_q, reduced_db, depth + 1)

    def ground(self, q: Query, atom: Atom, db: Database, depth: int) -> bool:
        blocks = sort_blocks(b for b in db.blocks if b[0] == atom.name)
        residual = q.without(atom)
        self.record('ground', depth, atom=atom.name, blocks=len(blocks))
        for block in blocks:
            facts = db.block(block)
            if any(atom.match(f) is None for f in facts):
                continue
            ok = True
            for fact in facts:
                theta = atom.match(fact)
                assert theta is not None
                child = residual.substitute(theta)
                if not self.certain(child, db, depth):
                    ok = False
                    break
            if ok:
                self.record('choose', depth, atom=atom.name,
                            block=','.join(c.label() for c in block[1]))
                return True
        return False


def certain_answer_direct(q: Query, db: Database,
                          order: ConstantOrder = ConstantOrder.ASCENDING,
                          cap: Optional[int] = None) -> CertainAnswerTrace:
    '''Certain answer of q on db with a stage-by-stage trace.

    coNP-complete queries fall back to the repair oracle (bounded by `cap`); the trace
    records the fallback.
    '''
    complexity = classify_complexity(q)
    if complexity is ComplexityClass.CONP_COMPLETE:
        logger.warning(f"CQA({q.name}) is coNP-complete; falling back to repair enumeration")
        answer = certain_answer_oracle(q, db, cap)
        step = TraceStep('oracle', 0, {'complexity': complexity.value})
        return CertainAnswerTrace(answer, [step], oracle_fallback=True)
    evaluator = _DirectEvaluator(order)
    evaluator.record('classify', 0, complexity=complexity.value, atoms=len(q))
    answer = evaluator.certain(q, db, 0)
    return CertainAnswerTrace(answer, evaluator.steps)


def program_answer(q: Query, db: Database, faithful: bool = True,
                   order: ConstantOrder = ConstantOrder.ASCENDING) -> bool:
    '''Certain answer computed by the compiled Datalog program.'''
    return compose_pipeline(q, faithful).answer(db, order)


@dataclass
class DifferentialResult:
    """Answers of the three evaluators on one instance; None where one was not applicable."""
    direct: bool
    oracle: Optional[bool]
    program: Optional[bool]

    @property
    def agree(self) -> bool:
        answers = {a for a in (self.direct, self.oracle, self.program) if a is not None}
        return len(answers) == 1

    def __str__(self) -> str:
        def show(a: Optional[bool]) -> str:
            return 'n/a' if a is None else str(a).lower()
        return f"direct={show(self.direct)} oracle={show(self.oracle)} program={show(self.program)}"


def differential_check(q: Query, db: Database, cap: Optional[int] = None, faithful: bool = True,
                       order: ConstantOrder = ConstantOrder.ASCENDING) -> DifferentialResult:
    '''Run direct evaluation, the repair oracle and the compiled program on one instance.'''
    direct = certain_answer_direct(q, db, order, cap).answer
    try:
        oracle: Optional[bool] = certain_answer_oracle(q, db, cap)
    except OracleInfeasibleError:
        oracle = None
    program: Optional[bool] = None
    if classify_complexity(q) is not ComplexityClass.CONP_COMPLETE:
        program = program_answer(q, db, faithful, order)
    return DifferentialResult(direct, oracle, program)
