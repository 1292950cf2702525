#!/usr/bin/env python3
"""
Cycle Reduction Rules

After the garbage of an M-cycle C is removed, every remaining embedding of C belongs to one
strong component of the C-hook graph. The reduction replaces C by a fresh mode-i atom
T(u | vars(C)) whose key u names the component, plus mode-c atoms N_i(key(F_i) | u).
Components are found by symmetric transitive closure over embeddings that share a key of
some F_i, and named by their least F_0 key through min-aggregation.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

from ..core.schema import Atom, Mode, Query
from ..core.terms import Term, Variable, term_vars
from ..datalog.ir import BodyItem, Program
from ..datalog.validate import make_program
from ..errors import PreconditionError
from ..mgraph import MCycle
from .garbage_program import CycleEmitter, edb_of
from .stage import NameAllocator, Stage, check_variable_names, copy_terms, generic

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReductionPlan:
    """The query-level outcome of reducing one M-cycle."""
    cycle: MCycle
    t_atom: Atom
    n_atoms: Tuple[Atom, ...]
    new_query: Query
    u_vars: Tuple[str, ...]

    @property
    def cycle_vars(self) -> Tuple[str, ...]:
        return term_vars(self.t_atom.value_terms)


def reduction_plan(q: Query, cycle: MCycle, depth: int = 0,
                   taken: Iterable[str] = ()) -> ReductionPlan:
    '''q' = (q minus C) plus T_<depth>(u | vars(C)) plus N_red_<depth>_<i>@c(key(F_i) | u).'''
    if not all(a in q for a in cycle.atoms):
        raise PreconditionError(f"{cycle} uses atoms outside {q.name}")
    taken = set(taken)
    u_vars = []
    for _ in range(cycle.atoms[0].relation.key_len):
        name = q.fresh_var('u', u_vars)
        u_vars.append(name)
    u_terms = tuple(Variable(u) for u in u_vars)
    cycle_terms: Tuple[Term, ...] = ()
    for atom in cycle.atoms:
        cycle_terms += atom.terms
    cycle_vars = tuple(Variable(x) for x in term_vars(cycle_terms))
    t_name = q.fresh_name(f"T_{depth}", taken)
    t_atom = Atom.make(t_name, u_terms, cycle_vars)
    names = {t_name}
    n_atoms = []
    for i, atom in enumerate(cycle.atoms):
        n_name = q.fresh_name(f"N_red_{depth}_{i}", taken | names)
        names.add(n_name)
        n_atoms.append(Atom.make(n_name, atom.key_terms, u_terms, mode=Mode.C))
    new_query = q.without(*cycle.atoms).with_atoms(t_atom, *n_atoms)
    return ReductionPlan(cycle, t_atom, tuple(n_atoms), new_query, tuple(u_vars))


def emit_reduction_rules(emitter: CycleEmitter, plan: ReductionPlan) -> Dict[str, str]:
    '''Emit keep, Link, Trans, IdentifiedBy, T and N rules after the garbage rules.

    Returns the predicates of T and every N_i, keyed by their relation names in q'.
    '''
    stage, names, k = emitter.stage, emitter.names, emitter.k
    keep_preds: Dict[str, str] = {}
    for i in range(k):
        name = emitter.relation_of(i)
        keep = keep_preds[name] = names.fresh(f"keep_{name}")
        c = generic('c', emitter.cycle.atoms[i].relation.arity)
        emitter.emit(keep, c, [stage.relation_literal(name, c),
                               stage.lit(emitter.del_preds[name], c[:emitter.key_len(i)],
                                         negated=True)])
    kept = stage.with_relations(keep_preds)

    link = names.fresh('Link')
    trans = names.fresh('Trans')
    ident = names.fresh('IdentifiedBy')
    for i in range(k):
        body: List[BodyItem] = [*emitter.qcopy(0, kept), *emitter.qcopy(1, kept)]
        body.append(emitter.keyeq(i, emitter.kt(i, 0), emitter.kt(i, 1)))
        emitter.emit(link, emitter.kt(0, 0) + emitter.kt(0, 1), body)

    width = emitter.key_len(0)
    a, b, d = generic('a', width), generic('b', width), generic('d', width)
    emitter.emit(trans, a + b, [stage.lit(link, a + b)])
    emitter.emit(trans, a + b, [stage.lit(trans, a + d), stage.lit(link, d + b)])
    emitter.emit(trans, a + d, [stage.lit(trans, a + b), stage.lit(link, d + b)])
    emitter.emit(ident, a + b, [stage.lit(trans, a + b)], min_from=width)

    u = generic('u', width)
    cycle_cols = copy_terms(plan.t_atom.value_terms, 0)
    t_pred = names.fresh(plan.t_atom.name)
    t_body: List[BodyItem] = list(emitter.qcopy(0, kept))
    t_body.append(stage.lit(ident, emitter.kt(0, 0) + u))
    emitter.emit(t_pred, u + cycle_cols, t_body)
    out = {plan.t_atom.name: t_pred}
    for i, n_atom in enumerate(plan.n_atoms):
        n_pred = names.fresh(n_atom.name)
        n_body: List[BodyItem] = [stage.lit(t_pred, u + cycle_cols)]
        emitter.emit(n_pred, emitter.kt(i, 0) + u, n_body)
        out[n_atom.name] = n_pred
    logger.debug(f"Reduction rules for {plan.cycle}: T={t_pred}")
    return out


def reduced_stage(stage: Stage, plan: ReductionPlan, predicates: Dict[str, str]) -> Stage:
    '''The stage in which q' is compiled: C dropped, T and N_i bound to their predicates.'''
    return stage.without_relations(plan.cycle.names).with_relations(predicates)


def emit_reduction_program(q: Query, cycle: MCycle,
                           faithful: bool = True) -> Tuple[Program, ReductionPlan]:
    '''Garbage plus reduction rules; the T and N relations of q' are named in the manifest.'''
    check_variable_names(q)
    if not cycle.is_cycle_of(q):
        raise PreconditionError(f"{cycle} is not an M-cycle of {q.name}")
    names = NameAllocator(q.relation_names)
    plan = reduction_plan(q, cycle)
    emitter = CycleEmitter(q, cycle, Stage.top(q), names, faithful)
    dels = emitter.emit_garbage()
    predicates = emit_reduction_rules(emitter, plan)
    manifest = {'query': str(q), 'cycle': str(cycle), 'reduced': str(plan.new_query),
                'mode': 'faithful' if faithful else 'builtin'}
    manifest.update({f"del.{name}": pred for name, pred in dels.items()})
    manifest.update({f"rel.{name}": pred for name, pred in predicates.items()})
    return make_program(emitter.rules, edb_of(q), None, manifest), plan
