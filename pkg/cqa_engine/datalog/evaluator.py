#!/usr/bin/env python3
"""
Datalog Evaluator

Stratum-by-stratum evaluation: semi-naive iteration for ordinary rules, negation and
built-ins as filters over bound variables, and min rules evaluated once their inputs are
complete. Joins follow a static greedy plan per (rule, delta literal) and use hash indices
that are kept up to date as relations grow.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

from ..core.database import Database, database_to_edb
from ..core.terms import Constant, ConstantOrder, Term, Variable
from ..errors import RangeRestrictionError
from .ir import Comparison, Literal, Program, Rule
from .validate import check_program

logger = logging.getLogger(__name__)

Row = Tuple[Constant, ...]
Store = Dict[str, Set[Row]]
Binding = Dict[str, Constant]


class Relation:
    """A set of rows with lazily created, incrementally maintained hash indices."""

    def __init__(self, rows: Iterable[Row] = ()):
        self.rows: Set[Row] = set()
        self.indices: Dict[Tuple[int, ...], Dict[Row, List[Row]]] = {}
        for row in rows:
            self.add(row)

    def __len__(self) -> int:
        return len(self.rows)

    def __contains__(self, row: object) -> bool:
        return row in self.rows

    def add(self, row: Row) -> bool:
        if row in self.rows:
            return False
        self.rows.add(row)
        for positions, index in self.indices.items():
            index.setdefault(tuple(row[i] for i in positions), []).append(row)
        return True

    def lookup(self, positions: Tuple[int, ...], key: Row) -> Sequence[Row]:
        if not positions:
            return list(self.rows)
        index = self.indices.get(positions)
        if index is None:
            index = {}
            for row in self.rows:
                index.setdefault(tuple(row[i] for i in positions), []).append(row)
            self.indices[positions] = index
        return index.get(key, ())


@dataclass(frozen=True)
class _Scan:
    literal: Literal
    body_index: int
    bound_positions: Tuple[int, ...]


@dataclass(frozen=True)
class _Filter:
    item: Union[Literal, Comparison]
    binds: bool = False


_Step = Union[_Scan, _Filter]


def _term_bound(t: Term, bound: Set[str]) -> bool:
    return not isinstance(t, Variable) or t.name in bound


def _plan(rule: Rule, first: Optional[int]) -> List[_Step]:
    '''Greedy join order: the delta literal first, then the literal with most bound arguments;
    filters run as soon as their variables are bound.'''
    bound: Set[str] = set()
    steps: List[_Step] = []
    positives = [i for i, b in enumerate(rule.body) if isinstance(b, Literal) and not b.negated]
    filters = [b for b in rule.body if not (isinstance(b, Literal) and not b.negated)]

    def scan(i: int) -> None:
        lit = rule.body[i]
        assert isinstance(lit, Literal)
        positions = tuple(p for p, t in enumerate(lit.args) if _term_bound(t, bound))
        steps.append(_Scan(lit, i, positions))
        bound.update(lit.vars)
        positives.remove(i)

    def place_filters() -> None:
        progress = True
        while progress:
            progress = False
            for item in list(filters):
                if item.vars <= bound:
                    steps.append(_Filter(item))
                    filters.remove(item)
                    progress = True
                elif isinstance(item, Comparison) and item.op == '=':
                    left = all(_term_bound(t, bound) for t in item.left)
                    right = all(_term_bound(t, bound) for t in item.right)
                    if left or right:
                        steps.append(_Filter(item, binds=True))
                        bound.update(item.vars)
                        filters.remove(item)
                        progress = True

    if first is not None:
        scan(first)
    place_filters()
    while positives:
        best = max(positives, key=lambda i: (
            sum(_term_bound(t, bound) for t in rule.body[i].args),  # type: ignore[union-attr]
            -i))
        scan(best)
        place_filters()
    if filters:
        raise RangeRestrictionError(f"rule `{rule}` cannot bind {filters[0]}")
    return steps


def _ground(terms: Sequence[Term], binding: Binding) -> Row:
    return tuple(binding[t.name] if isinstance(t, Variable) else t for t in terms)


def _unify(terms: Sequence[Term], row: Row, binding: Binding) -> Optional[Binding]:
    out = binding
    for t, value in zip(terms, row):
        if isinstance(t, Variable):
            seen = out.get(t.name)
            if seen is None:
                if out is binding:
                    out = dict(binding)
                out[t.name] = value
            elif seen != value:
                return None
        elif t != value:
            return None
    return out


class _Evaluator:
    def __init__(self, program: Program, order: ConstantOrder):
        self.program = program
        self.order = order
        self.relations: Dict[str, Relation] = {}
        self.plans: Dict[Tuple[int, Optional[int]], List[_Step]] = {}

    def relation(self, name: str) -> Relation:
        rel = self.relations.get(name)
        if rel is None:
            rel = self.relations[name] = Relation()
        return rel

    def plan(self, rule: Rule, first: Optional[int]) -> List[_Step]:
        key = (id(rule), first)
        steps = self.plans.get(key)
        if steps is None:
            steps = self.plans[key] = _plan(rule, first)
        return steps

    def run(self, rule: Rule, first: Optional[int] = None,
            delta: Optional[Relation] = None) -> List[Row]:
        steps = self.plan(rule, first)
        out: List[Row] = []

        def step(i: int, binding: Binding) -> None:
            if i == len(steps):
                out.append(_ground(rule.head.args, binding))
                return
            s = steps[i]
            if isinstance(s, _Scan):
                rel = delta if (delta is not None and s.body_index == first) \
                    else self.relation(s.literal.predicate)
                key = tuple(_ground([s.literal.args[p]], binding)[0] for p in s.bound_positions)
                for row in rel.lookup(s.bound_positions, key):
                    nxt = _unify(s.literal.args, row, binding)
                    if nxt is not None:
                        step(i + 1, nxt)
                return
            item = s.item
            if isinstance(item, Literal):
                if _ground(item.args, binding) not in self.relation(item.predicate):
                    step(i + 1, binding)
                return
            if s.binds:
                left_bound = all(_term_bound(t, set(binding)) for t in item.left)
                source, target = (item.left, item.right) if left_bound else (item.right, item.left)
                nxt = _unify(target, _ground(source, binding), binding)
                if nxt is not None:
                    step(i + 1, nxt)
                return
            equal = _ground(item.left, binding) == _ground(item.right, binding)
            if equal == (item.op == '='):
                step(i + 1, binding)

        step(0, {})
        return out

    def stratum(self, rules: List[Rule], naive: bool) -> None:
        plain = [r for r in rules if not r.is_min]
        heads = {r.head.predicate for r in plain}
        if naive:
            changed = True
            while changed:
                changed = False
                for r in plain:
                    for row in self.run(r):
                        changed |= self.relation(r.head.predicate).add(row)
        else:
            delta: Dict[str, Relation] = {h: Relation() for h in heads}
            for r in plain:
                for row in self.run(r):
                    if self.relation(r.head.predicate).add(row):
                        delta[r.head.predicate].add(row)
            while any(len(d) for d in delta.values()):
                fresh: Dict[str, Set[Row]] = {h: set() for h in heads}
                for r in plain:
                    for i, b in enumerate(r.body):
                        if not isinstance(b, Literal) or b.negated or b.predicate not in heads:
                            continue
                        d = delta[b.predicate]
                        if not len(d):
                            continue
                        for row in self.run(r, i, d):
                            if row not in self.relation(r.head.predicate):
                                fresh[r.head.predicate].add(row)
                delta = {h: Relation() for h in heads}
                for h, rows in fresh.items():
                    for row in rows:
                        if self.relation(h).add(row):
                            delta[h].add(row)
        self.min_rules([r for r in rules if r.is_min])

    def min_rules(self, rules: List[Rule]) -> None:
        groups: Dict[Tuple[str, Row], Row] = {}
        for r in rules:
            cut = r.min_from
            assert cut is not None
            for row in self.run(r):
                group, tail = (r.head.predicate, row[:cut]), row[cut:]
                best = groups.get(group)
                if best is None or self.order.key(tail) < self.order.key(best):
                    groups[group] = tail
        for (pred, group), tail in groups.items():
            self.relation(pred).add(group + tail)


def evaluate(p: Program, edb: Union[Database, Mapping[str, Iterable[Row]]],
             order: ConstantOrder = ConstantOrder.ASCENDING, naive: bool = False) -> Store:
    '''Evaluate every stratum in order; returns EDB and IDB relations.'''
    check_program(p)
    source = database_to_edb(edb) if isinstance(edb, Database) else edb
    ev = _Evaluator(p, order)
    for name, rows in source.items():
        rel = ev.relation(name)
        for row in rows:
            rel.add(tuple(row))
    for i, stratum in enumerate(p.strata):
        ev.stratum(stratum, naive)
        logger.debug(f"Stratum {i}: {len(stratum)} rule(s) evaluated")
    return {name: set(rel.rows) for name, rel in ev.relations.items()}


def goal_holds(p: Program, store: Store, goal: Optional[str] = None) -> bool:
    name = goal or p.goal
    if name is None:
        raise ValueError("program has no goal predicate")
    return bool(store.get(name))
