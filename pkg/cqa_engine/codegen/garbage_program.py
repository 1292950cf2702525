#!/usr/bin/env python3
"""
Garbage-Set Rules

Rules deriving del_R(key) for every block R(key, *) in the maximal garbage set of an M-cycle
C = F_0 -> ... -> F_{k-1} -> F_0. The rule families follow the seed-and-close
characterisation that `garbage.maximal_garbage_set` computes directly:

- facts of C's relations outside every embedding of the query;
- facts on irrelevant 1-embeddings;
- facts on n-embeddings, 2 <= n <= 2k-3, by one non-recursive rule per n that chains
  Hook_i edges (one query copy each) around the cycle;
- k-cycles of the relevant block quotient lying on a chordless cycle of length >= 2k in
  their intersection graph, found with a symmetric undirected-connectivity predicate;
- closure over relevant embeddings through mutually symmetric del rules.

Key (dis)equality is either written with eq_R/diseq_R predicates (faithful mode, plain
Datalog with negation) or with the built-in vector comparisons.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

from ..core.schema import Query
from ..core.terms import Term, Variable
from ..datalog.ir import BodyItem, Comparison, Literal, Program, Rule
from ..datalog.validate import make_program
from ..errors import PreconditionError
from ..mgraph import MCycle
from .stage import NameAllocator, Stage, check_variable_names, copy_terms, generic

logger = logging.getLogger(__name__)

Vertex = Tuple[Tuple[Term, ...], ...]


class CycleEmitter:
    """Rule builder for one M-cycle inside one stage."""

    def __init__(self, q: Query, cycle: MCycle, stage: Stage, names: NameAllocator,
                 faithful: bool = True):
        self.q = q
        self.cycle = cycle
        self.stage = stage
        self.names = names
        self.faithful = faithful
        self.k = cycle.k
        self.rules: List[Rule] = []
        self.del_preds: Dict[str, str] = {}
        self.eq_preds: Dict[int, str] = {}
        self.diseq_preds: Dict[int, str] = {}
        self.hook_preds: Dict[int, str] = {}

    # -- term helpers -------------------------------------------------------------------------

    def key_len(self, i: int) -> int:
        return self.cycle.atoms[i].relation.key_len

    def kt(self, i: int, copy: int) -> Tuple[Term, ...]:
        return copy_terms(self.cycle.atoms[i].key_terms, copy)

    def vt(self, i: int, copy: int) -> Tuple[Term, ...]:
        return copy_terms(self.cycle.atoms[i].value_terms, copy)

    def qcopy(self, copy: int, stage: Optional[Stage] = None) -> List[Literal]:
        return (stage or self.stage).query_literals(self.q, copy)

    def emit(self, predicate: str, args: Sequence[Term], body: Sequence[BodyItem],
             min_from: Optional[int] = None) -> None:
        self.rules.append(self.stage.rule(predicate, args, body, min_from))

    def relation_of(self, i: int) -> str:
        return self.cycle.names[i]

    # -- key comparisons ----------------------------------------------------------------------

    def emit_key_predicates(self) -> None:
        if not self.faithful:
            return
        for i in range(self.k):
            name = self.relation_of(i)
            arity = self.cycle.atoms[i].relation.arity
            c, d = generic('c', arity), generic('d', arity)
            ck, dk = c[:self.key_len(i)], d[:self.key_len(i)]
            eq = self.eq_preds[i] = self.names.fresh(f"eq_{name}")
            diseq = self.diseq_preds[i] = self.names.fresh(f"diseq_{name}")
            self.emit(eq, ck + ck, [self.stage.relation_literal(name, c)])
            self.emit(diseq, ck + dk, [self.stage.relation_literal(name, c),
                                       self.stage.relation_literal(name, d),
                                       self.stage.lit(eq, ck + dk, negated=True)])

    def keyeq(self, i: int, a: Sequence[Term], b: Sequence[Term]) -> BodyItem:
        if self.faithful:
            return self.stage.lit(self.eq_preds[i], tuple(a) + tuple(b))
        return Comparison('=', tuple(a), tuple(b))

    def keyneq(self, i: int, a: Sequence[Term], b: Sequence[Term]) -> BodyItem:
        if self.faithful:
            return self.stage.lit(self.diseq_preds[i], tuple(a) + tuple(b))
        return Comparison('!=', tuple(a), tuple(b))

    # -- garbage ------------------------------------------------------------------------------

    def emit_garbage(self) -> Dict[str, str]:
        '''Emit every garbage rule; returns relation -> del predicate.'''
        for i in range(self.k):
            name = self.relation_of(i)
            self.del_preds[name] = self.names.fresh(f"del_{name}")
        self.emit_key_predicates()
        self._not_in_embedding()
        self._closure()
        self._hook_edges()
        self._irrelevant_one_embeddings()
        for n in range(2, 2 * self.k - 2):
            self._n_embeddings(n)
        self._long_cycles()
        logger.debug(f"Garbage rules for {self.cycle}: {len(self.rules)} rule(s)")
        return dict(self.del_preds)

    def delete(self, i: int, key: Sequence[Term], body: Sequence[BodyItem]) -> None:
        self.emit(self.del_preds[self.relation_of(i)], key, body)

    def _not_in_embedding(self) -> None:
        for i in range(self.k):
            name = self.relation_of(i)
            good = self.names.fresh(f"good_{name}")
            self.emit(good, self.kt(i, 0) + self.vt(i, 0), self.qcopy(0))
            c = generic('c', self.cycle.atoms[i].relation.arity)
            self.delete(i, c[:self.key_len(i)], [self.stage.relation_literal(name, c),
                                                 self.stage.lit(good, c, negated=True)])

    def _closure(self) -> None:
        for i in range(self.k):
            for j in range(self.k):
                if i == j:
                    continue
                pred_i = self.del_preds[self.relation_of(i)]
                self.delete(j, self.kt(j, 0),
                            self.qcopy(0) + [self.stage.lit(pred_i, self.kt(i, 0))])

    # -- hook edges and embeddings ------------------------------------------------------------

    def _hook_edges(self) -> None:
        '''Hook_i(A, key(B)): A = theta(F_i) and B is in the block of theta(F_{i+1}).'''
        for i in range(self.k):
            j = (i + 1) % self.k
            self.hook_preds[i] = self.names.fresh(f"Hook{i}")
            self.emit(self.hook_preds[i], self.kt(i, 0) + self.vt(i, 0) + self.kt(j, 0),
                      self.qcopy(0))

    def hook_chain(self, length: int) -> List[BodyItem]:
        '''C-hook path V_0 -> ... -> V_{length-1} -> V_0, vertex t being copy t of F_{t mod k}.'''
        body: List[BodyItem] = []
        for t in range(length):
            i, nxt = t % self.k, (t + 1) % length
            j = nxt % self.k
            target = copy_terms(self.cycle.atoms[j].key_terms, length + t)
            body.append(self.stage.lit(self.hook_preds[i],
                                       self.kt(i, t) + self.vt(i, t) + target))
            body.append(self.keyeq(j, target, self.kt(j, nxt)))
        return body

    def _irrelevant_one_embeddings(self) -> None:
        any1 = self.names.fresh('Any1Emb')
        rel1 = self.names.fresh('Rel1Emb')
        irr1 = self.names.fresh('Irr1Emb')
        facts: Tuple[Term, ...] = ()
        for i in range(self.k):
            facts += self.kt(i, i) + self.vt(i, i)
        self.emit(any1, facts, self.hook_chain(self.k))

        relevant: Tuple[Term, ...] = ()
        for i in range(self.k):
            relevant += self.kt(i, 0) + self.vt(i, 0)
        self.emit(rel1, relevant, self.qcopy(0))

        keys: Tuple[Term, ...] = ()
        for i in range(self.k):
            keys += self.kt(i, i)
        self.emit(irr1, keys, [self.stage.lit(any1, facts),
                               self.stage.lit(rel1, facts, negated=True)])
        for i in range(self.k):
            self.delete(i, self.kt(i, i), [self.stage.lit(irr1, keys)])

    def _n_embeddings(self, n: int) -> None:
        '''Elementary C-hook cycles of length n*k through pairwise distinct blocks.'''
        length = n * self.k
        body = self.hook_chain(length)
        for t in range(length):
            for t2 in range(t + self.k, length, self.k):
                i = t % self.k
                body.append(self.keyneq(i, self.kt(i, t), self.kt(i, t2)))
        pred = self.names.fresh(f"NEmb{n}")
        keys: Tuple[Term, ...] = ()
        for t in range(length):
            keys += self.kt(t % self.k, t)
        self.emit(pred, keys, body)
        for t in range(length):
            self.delete(t % self.k, self.kt(t % self.k, t), [self.stage.lit(pred, keys)])

    # -- long chordless cycles among k-cycles of the relevant quotient --------------------------

    def vertex(self, m: int) -> Vertex:
        return tuple(tuple(Variable(f"gen__v{m}__{i}__{c}") for c in range(self.key_len(i)))
                     for i in range(self.k))

    @staticmethod
    def flat(*vertices: Vertex) -> Tuple[Term, ...]:
        out: Tuple[Term, ...] = ()
        for v in vertices:
            for key in v:
                out += key
        return out

    def _long_cycles(self) -> None:
        k = self.k
        quot = [self.names.fresh(f"Quot{i}") for i in range(k)]
        kcyc = self.names.fresh('KCyc')
        neq = self.names.fresh('Neq')
        edge = self.names.fresh('E')
        guard = self.names.fresh('Guard')
        ucon = self.names.fresh('UCon')
        in_long = self.names.fresh('InLongCycle')
        lit = self.stage.lit
        flat = self.flat

        for i in range(k):
            self.emit(quot[i], self.kt(i, 0) + self.kt((i + 1) % k, 0), self.qcopy(0))
        v = self.vertex(0)
        self.emit(kcyc, flat(v), [lit(quot[i], v[i] + v[(i + 1) % k]) for i in range(k)])

        a, b = self.vertex(1), self.vertex(2)
        both = [lit(kcyc, flat(a)), lit(kcyc, flat(b))]
        for j in range(k):
            self.emit(neq, flat(a, b), both + [self.keyneq(j, a[j], b[j])])
        for i in range(k):
            self.emit(edge, flat(a, b), both + [self.keyeq(i, a[i], b[i]),
                                                lit(neq, flat(a, b))])

        def E(x: Vertex, y: Vertex, negated: bool = False) -> Literal:
            return lit(edge, flat(x, y), negated)

        def avoid(x: Vertex, others: Sequence[Vertex]) -> List[BodyItem]:
            out: List[BodyItem] = []
            for o in others:
                out += [lit(neq, flat(x, o)), E(x, o, negated=True)]
            return out

        path = [self.vertex(m) for m in range(1, 2 * k + 1)]  # V_1 .. V_2k
        v1, v2k = path[0], path[-1]
        guarded = path[:-1]                                    # V_1 .. V_{2k-1}
        excluded = path[1:-1]                                  # V_2 .. V_{2k-1}
        guard_body: List[BodyItem] = [E(guarded[m], guarded[m + 1])
                                      for m in range(len(guarded) - 1)]
        for x in range(len(guarded)):
            for y in range(x + 2, len(guarded)):
                guard_body.append(E(guarded[x], guarded[y], negated=True))
        for x in range(len(guarded)):
            for y in range(x + 1, len(guarded)):
                guard_body.append(lit(neq, flat(guarded[x], guarded[y])))
        self.emit(guard, flat(*guarded), guard_body)

        start, va, vb = self.vertex(2 * k + 1), self.vertex(2 * k + 2), self.vertex(2 * k + 3)
        self.emit(ucon, flat(v1, start, *excluded),
                  [lit(guard, flat(*guarded)), E(v1, start)] + avoid(start, excluded))
        step = avoid(va, excluded) + avoid(vb, excluded)
        self.emit(ucon, flat(v1, vb, *excluded),
                  [lit(ucon, flat(v1, va, *excluded)), E(va, vb)] + step)
        self.emit(ucon, flat(v1, va, *excluded),
                  [lit(ucon, flat(v1, vb, *excluded)), E(va, vb)] + step)

        closing: List[BodyItem] = [lit(guard, flat(*guarded)), E(path[-2], v2k)]
        for m in range(1, 2 * k - 2):
            closing.append(E(path[m], v2k, negated=True))
        for m in range(1, 2 * k - 1):
            closing.append(lit(neq, flat(path[m], v2k)))
        self.emit(in_long, flat(v1), closing + [E(v1, v2k)])
        vz = self.vertex(2 * k + 4)
        self.emit(in_long, flat(v1), closing + [lit(ucon, flat(v1, vz, *excluded)), E(vz, v2k)])
        for i in range(k):
            self.delete(i, v1[i], [lit(in_long, flat(v1))])


def edb_of(q: Query) -> Dict[str, int]:
    return {a.name: a.relation.arity for a in q.atoms}


def emit_garbage_program(q: Query, cycle: MCycle, faithful: bool = True) -> Program:
    '''Standalone program whose del_R relations hold the keys of the maximal garbage set.'''
    check_variable_names(q)
    if not cycle.is_cycle_of(q):
        raise PreconditionError(f"{cycle} is not an M-cycle of {q.name}")
    names = NameAllocator(q.relation_names)
    emitter = CycleEmitter(q, cycle, Stage.top(q), names, faithful)
    dels = emitter.emit_garbage()
    manifest = {'query': str(q), 'cycle': str(cycle),
                'mode': 'faithful' if faithful else 'builtin'}
    manifest.update({f"del.{name}": pred for name, pred in dels.items()})
    return make_program(emitter.rules, edb_of(q), None, manifest)
