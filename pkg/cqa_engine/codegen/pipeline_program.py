#!/usr/bin/env python3
"""
Pipeline Composition

Compiles CQA(q) for a query outside coNP into one stratified Datalog program whose 0-ary goal
holds exactly when every repair satisfies q. The compiled recursion mirrors
`pipeline.certain_answer_direct`:

1. saturate the query and emit the purification rules of every added mode-c atom;
2. with no mode-i atom left, the goal is the query itself;
3. with an unattacked mode-i atom R, open a grounding stage: some R-block matching the key
   pattern has every fact matching the full pattern with a certain residual query;
4. otherwise take an M-cycle, emit its garbage and reduction rules and compile q'.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ..attack_analysis import ComplexityClass, attack_graph, classify_complexity
from ..core.database import Database
from ..core.schema import Atom, Query
from ..core.terms import ConstantOrder, Variable, term_vars
from ..datalog.evaluator import evaluate, goal_holds
from ..datalog.ir import BodyItem, Comparison, Program, Rule
from ..datalog.text import print_program
from ..datalog.validate import make_program
from ..errors import ClassificationRefusedError, PreconditionError
from ..mgraph import find_mcycle
from ..saturation import EMPTY_KEY, SaturationResult, saturate
from .garbage_program import CycleEmitter, edb_of
from .reduction_program import emit_reduction_rules, reduced_stage, reduction_plan
from .stage import (NameAllocator, Stage, check_variable_names, copy_term, copy_terms, generic,
                    param_constant)

logger = logging.getLogger(__name__)

MAX_STAGES = 256


def pick_unattacked(q: Query) -> Optional[Atom]:
    '''Unattacked mode-i atom, preferring constant keys, then relation name.'''
    g = attack_graph(q)
    free = [a for a in q.iatoms if not g.attacked(a.name)]
    if not free:
        return None
    return min(free, key=lambda a: (not a.has_constant_key, a.name))


@dataclass
class PipelineProgram:
    query: Query
    program: Program
    goal: str
    complexity: ComplexityClass
    stages: List[str] = field(default_factory=list)

    def render(self) -> str:
        return print_program(self.program)

    def answer(self, db: Database, order: ConstantOrder = ConstantOrder.ASCENDING,
               naive: bool = False) -> bool:
        store = evaluate(self.program, db.restrict(self.query.relation_names), order, naive)
        return goal_holds(self.program, store, self.goal)


class _Compiler:
    def __init__(self, q: Query, faithful: bool):
        self.faithful = faithful
        self.names = NameAllocator(q.relation_names)
        self.rules: List[Rule] = []
        self.stages: List[str] = []

    def note(self, text: str) -> None:
        if len(self.stages) >= MAX_STAGES:
            raise PreconditionError(f"compilation exceeded {MAX_STAGES} stages")
        self.stages.append(text)
        logger.debug(f"Stage {len(self.stages) - 1}: {text}")

    def compile(self, q: Query, stage: Stage, goal: str, depth: int) -> None:
        sat = saturate(q)
        if sat.changed:
            stage = self.purification(q, sat, stage)
            q = sat.query
        if not q.iatoms:
            self.note(f"evaluate {q}")
            self.rules.append(stage.rule(goal, (), stage.query_literals(q, 0)))
            return
        atom = pick_unattacked(q)
        if atom is not None:
            self.ground(q, atom, stage, goal, depth)
            return
        cycle = find_mcycle(q)
        if cycle is None:
            raise PreconditionError(f"{q.name} has attacked mode-i atoms but no M-cycle")
        plan = reduction_plan(q, cycle, depth)
        self.note(f"reduce {cycle} -> {plan.new_query}")
        emitter = CycleEmitter(q, cycle, stage, self.names, self.faithful)
        emitter.emit_garbage()
        predicates = emit_reduction_rules(emitter, plan)
        self.rules.extend(emitter.rules)
        self.compile(plan.new_query, reduced_stage(stage, plan, predicates), goal, depth + 1)

    def purification(self, q: Query, sat: SaturationResult, stage: Stage) -> Stage:
        current = q
        for step in sat.added:
            self.note(f"saturate {step.atom}")
            host = current.atom(step.host)
            lhs = sorted(step.lhs)
            shared = {x: f"{x}__0" for x in lhs}
            z = tuple(Variable(shared[x]) for x in lhs)
            w0 = copy_term(Variable(step.target), 0)
            w1 = copy_term(Variable(step.target), 1, shared)

            viol = self.names.fresh(f"viol_{step.atom.name}")
            body: List[BodyItem] = [*stage.query_literals(current, 0),
                                    *stage.query_literals(current, 1, shared),
                                    Comparison('!=', (w0,), (w1,))]
            self.rules.append(stage.rule(viol, z, body))

            blocks = self.names.fresh(f"viol_blk_{step.atom.name}")
            self.rules.append(stage.rule(blocks, copy_terms(host.key_terms, 0),
                                         [*stage.query_literals(current, 0), stage.lit(viol, z)]))

            purified = self.names.fresh(f"{host.name}_pur")
            c = generic('c', host.relation.arity)
            self.rules.append(stage.rule(purified, c, [
                stage.relation_literal(host.name, c),
                stage.lit(blocks, c[:host.relation.key_len], negated=True)]))
            stage = stage.with_relations({host.name: purified})

            n_pred = self.names.fresh(step.atom.name)
            key = z or (EMPTY_KEY,)
            self.rules.append(stage.rule(n_pred, key + (w0,), stage.query_literals(current, 0)))
            stage = stage.with_relations({step.atom.name: n_pred})
            current = current.with_atoms(step.atom)
        return stage

    def ground(self, q: Query, atom: Atom, stage: Stage, goal: str, depth: int) -> None:
        names = sorted(atom.vars)
        self.note(f"ground {atom} on {', '.join(names) or 'its constants'}")
        bound = tuple(Variable(f"{x}__0") for x in names)
        terms = copy_terms(atom.terms, 0)
        key = copy_terms(atom.key_terms, 0)
        key_vars = tuple(Variable(f"{x}__0") for x in term_vars(atom.key_terms))
        fact = key + generic('c', len(atom.value_terms))

        ctx = self.names.fresh(f"ctx_{atom.name}")
        self.rules.append(stage.rule(ctx, bound, [stage.atom_literal(atom, 0)]))
        child_q = q.without(atom).substitute({x: param_constant(x) for x in names})
        child_stage = Stage(stage.params + tuple(names), ctx,
                            {k: v for k, v in stage.relations.items() if k != atom.name})
        child_goal = self.names.fresh(f"{goal}_{atom.name}")
        self.compile(child_q, child_stage, child_goal, depth)

        cand = self.names.fresh(f"cand_{atom.name}")
        ok = self.names.fresh(f"ok_{atom.name}")
        bad = self.names.fresh(f"bad_{atom.name}")
        self.rules.append(stage.rule(cand, key_vars, [stage.relation_literal(atom.name, fact)]))
        self.rules.append(stage.rule(ok, terms, [stage.lit(child_goal, bound),
                                                 stage.atom_literal(atom, 0)]))
        self.rules.append(stage.rule(bad, key_vars, [stage.lit(cand, key_vars),
                                                     stage.relation_literal(atom.name, fact),
                                                     stage.lit(ok, fact, negated=True)]))
        self.rules.append(stage.rule(goal, (), [stage.lit(cand, key_vars),
                                                stage.lit(bad, key_vars, negated=True)]))


def compose_pipeline(q: Query, faithful: bool = True) -> PipelineProgram:
    '''Compile CQA(q) into one program; refuses coNP-complete queries.'''
    check_variable_names(q)
    complexity = classify_complexity(q)
    if complexity is ComplexityClass.CONP_COMPLETE:
        raise ClassificationRefusedError(
            f"CQA({q.name}) is coNP-complete and has no Datalog rewriting", complexity)
    compiler = _Compiler(q, faithful)
    goal = compiler.names.fresh('certain')
    compiler.compile(q, Stage.top(q), goal, 0)
    manifest: Dict[str, str] = {
        'goal': goal,
        'query': str(q),
        'complexity': complexity.value,
        'mode': 'faithful' if faithful else 'builtin',
        'stages': str(len(compiler.stages)),
    }
    manifest.update({f"stage.{i}": text for i, text in enumerate(compiler.stages)})
    program = make_program(compiler.rules, edb_of(q), goal, manifest)
    logger.info(f"Compiled {q.name} ({complexity.value}) into {len(program)} rules "
                f"over {len(program.strata)} strata")
    return PipelineProgram(q, program, goal, complexity, list(compiler.stages))
