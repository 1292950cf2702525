#!/usr/bin/env python3
"""
Compilation Stages

A stage is one level of the compiled recursion. Stages below the top carry parameters: the
values of variables already grounded by an enclosing stage. Every predicate defined in a
stage takes the stage parameters as leading arguments, and every rule body of the stage
starts with the stage's context literal, which enumerates the admissible parameter values.

Naming conventions for generated variables:

    x__3          copy 3 of query variable x
    P__x          parameter for query variable x
    gen__c__0     generic columns, vertex columns and similar helpers

Query variables may not contain a double underscore, so the three families never collide.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from ..core.schema import Atom, Query
from ..core.terms import Constant, ConstantKind, Term, Variable
from ..datalog.ir import BodyItem, Literal, Rule
from ..errors import PreconditionError

PARAM_PREFIX = b"\x00param:"
RESERVED = '__'


def param_constant(name: str) -> Constant:
    '''Placeholder constant standing for the parameter bound to variable `name`.'''
    return Constant.text(PARAM_PREFIX + name.encode('utf-8'))


def param_name(term: Term) -> Optional[str]:
    if isinstance(term, Constant) and term.kind is ConstantKind.TEXT:
        raw = term.value
        if isinstance(raw, bytes) and raw.startswith(PARAM_PREFIX):
            return raw[len(PARAM_PREFIX):].decode('utf-8')
    return None


def param_var(name: str) -> Variable:
    return Variable(f"P__{name}")


def generic(prefix: str, n: int) -> Tuple[Variable, ...]:
    return tuple(Variable(f"gen__{prefix}__{j}") for j in range(n))


def check_variable_names(q: Query) -> None:
    bad = sorted(x for x in q.vars if RESERVED in x)
    if bad:
        raise PreconditionError(
            f"variable name(s) {', '.join(bad)} contain the reserved sequence {RESERVED!r}")


class NameAllocator:
    """Hands out predicate names that collide neither with each other nor with `used`."""

    def __init__(self, used: Iterable[str] = ()):
        self.used: Set[str] = set(used)

    def fresh(self, base: str) -> str:
        name = base
        i = 0
        while name in self.used:
            i += 1
            name = f"{base}__s{i}"
        self.used.add(name)
        return name


def copy_term(t: Term, copy: int, shared: Optional[Mapping[str, str]] = None) -> Term:
    if isinstance(t, Variable):
        if shared and t.name in shared:
            return Variable(shared[t.name])
        return Variable(f"{t.name}__{copy}")
    pname = param_name(t)
    if pname is not None:
        return param_var(pname)
    return t


def copy_terms(terms: Sequence[Term], copy: int,
               shared: Optional[Mapping[str, str]] = None) -> Tuple[Term, ...]:
    return tuple(copy_term(t, copy, shared) for t in terms)


@dataclass
class Stage:
    params: Tuple[str, ...] = ()
    ctx: Optional[str] = None
    # query relation name -> (predicate, parameters the predicate is indexed by)
    relations: Dict[str, Tuple[str, Tuple[str, ...]]] = field(default_factory=dict)

    @classmethod
    def top(cls, q: Query) -> 'Stage':
        return cls((), None, {name: (name, ()) for name in q.relation_names})

    @property
    def param_vars(self) -> Tuple[Variable, ...]:
        return tuple(param_var(p) for p in self.params)

    def ctx_items(self) -> List[BodyItem]:
        if self.ctx is None:
            return []
        return [Literal(self.ctx, self.param_vars)]

    def lit(self, predicate: str, args: Sequence[Term] = (), negated: bool = False) -> Literal:
        '''Literal over a predicate defined in this stage.'''
        return Literal(predicate, self.param_vars + tuple(args), negated)

    def rule(self, predicate: str, args: Sequence[Term], body: Iterable[BodyItem],
             min_from: Optional[int] = None) -> Rule:
        if min_from is not None:
            min_from += len(self.params)
        return Rule(self.lit(predicate, args), tuple(self.ctx_items()) + tuple(body), min_from)

    def atom_literal(self, atom: Atom, copy: int, negated: bool = False,
                     shared: Optional[Mapping[str, str]] = None) -> Literal:
        try:
            predicate, params = self.relations[atom.name]
        except KeyError:
            raise PreconditionError(f"relation {atom.name} has no predicate in this stage")
        args = tuple(param_var(p) for p in params) + copy_terms(atom.terms, copy, shared)
        return Literal(predicate, args, negated)

    def query_literals(self, q: Query, copy: int,
                       shared: Optional[Mapping[str, str]] = None) -> List[Literal]:
        return [self.atom_literal(a, copy, shared=shared) for a in q.atoms]

    def predicate(self, relation: str) -> str:
        return self.relations[relation][0]

    def relation_literal(self, relation: str, args: Sequence[Term],
                         negated: bool = False) -> Literal:
        '''Literal over the predicate of a query relation, with explicit columns.'''
        predicate, params = self.relations[relation]
        return Literal(predicate, tuple(param_var(p) for p in params) + tuple(args), negated)

    def with_relations(self, updates: Mapping[str, str]) -> 'Stage':
        '''Map the given relations to predicates defined in this stage.'''
        relations = dict(self.relations)
        for name, predicate in updates.items():
            relations[name] = (predicate, self.params)
        return replace(self, relations=relations)

    def without_relations(self, names: Iterable[str]) -> 'Stage':
        drop = set(names)
        return replace(self, relations={k: v for k, v in self.relations.items()
                                        if k not in drop})
