#!/usr/bin/env python3
"""
Program Validation

Stratification by strongly connected components of the predicate dependency graph, range
restriction, and the linear/symmetric checks for symmetric stratified Datalog.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Set

import networkx as nx

from ..core.terms import Variable
from ..errors import RangeRestrictionError, StratificationError
from .ir import Literal, Program, Rule

logger = logging.getLogger(__name__)


def bound_variables(rule: Rule) -> Set[str]:
    '''Variables bound by positive literals, then by equalities with a bound side.'''
    bound: Set[str] = set()
    for lit in rule.positive_literals:
        bound |= lit.vars
    changed = True
    while changed:
        changed = False
        for cmp in rule.comparisons:
            if cmp.op != '=':
                continue
            for side, other in ((cmp.left, cmp.right), (cmp.right, cmp.left)):
                side_vars = {t.name for t in side if isinstance(t, Variable)}
                other_vars = {t.name for t in other if isinstance(t, Variable)}
                if side_vars <= bound and not other_vars <= bound:
                    bound |= other_vars
                    changed = True
    return bound


def range_restriction_errors(rule: Rule) -> List[str]:
    bound = bound_variables(rule)
    needed = set(rule.head.vars)
    for lit in rule.negative_literals:
        needed |= lit.vars
    for cmp in rule.comparisons:
        needed |= cmp.vars
    missing = sorted(needed - bound)
    if missing:
        return [f"rule `{rule}` does not bind {', '.join(missing)}"]
    return []


def dependency_graph(rules: Iterable[Rule], edb: Iterable[str] = ()) -> nx.DiGraph:
    '''Edges body predicate -> head predicate over IDB predicates, labelled `strict` when the
    dependency goes through negation or a min head.'''
    rules = list(rules)
    idb = {r.head.predicate for r in rules} - set(edb)
    g = nx.DiGraph()
    g.add_nodes_from(sorted(idb))
    for r in rules:
        for lit in r.literals:
            if lit.predicate not in idb:
                continue
            strict = lit.negated or r.is_min
            head = r.head.predicate
            if g.has_edge(lit.predicate, head):
                g[lit.predicate][head]['strict'] |= strict
            else:
                g.add_edge(lit.predicate, head, strict=strict)
    return g


def stratify(rules: Iterable[Rule], edb: Iterable[str] = ()) -> List[List[Rule]]:
    '''One stratum per strongly connected component, in dependency order.'''
    rules = list(rules)
    edb = set(edb)
    g = dependency_graph(rules, edb)
    condensed = nx.condensation(g)
    for u, v, data in g.edges(data=True):
        if data['strict'] and condensed.graph['mapping'][u] == condensed.graph['mapping'][v]:
            raise StratificationError(
                f"predicate {v} depends on {u} through negation or min inside a recursion")
    order = list(nx.lexicographical_topological_sort(
        condensed, key=lambda n: min(condensed.nodes[n]['members'])))
    position = {node: i for i, node in enumerate(order)}
    strata: List[List[Rule]] = [[] for _ in order]
    for r in rules:
        if r.head.predicate in edb:
            raise StratificationError(f"rule defines EDB predicate {r.head.predicate}")
        strata[position[condensed.graph['mapping'][r.head.predicate]]].append(r)
    return [s for s in strata if s]


def make_program(rules: Iterable[Rule], edb: Mapping[str, int], goal: Optional[str] = None,
                 manifest: Optional[Mapping[str, str]] = None) -> Program:
    rules = list(rules)
    program = Program(stratify(rules, edb), dict(edb), goal, dict(manifest or {}))
    logger.debug(f"Built program with {len(rules)} rules in {len(program.strata)} strata")
    return program


@dataclass
class ValidationReport:
    stratified: bool = True
    linear: bool = True
    symmetric: bool = True
    range_restricted: bool = True
    errors: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.stratified and self.linear and self.symmetric and self.range_restricted

    def as_dict(self) -> Dict[str, object]:
        return {'stratified': self.stratified, 'linear': self.linear,
                'symmetric': self.symmetric, 'range_restricted': self.range_restricted,
                'errors': list(self.errors)}


def _recursive_literal(rule: Rule, same: Set[str]) -> List[Literal]:
    return [lit for lit in rule.literals if lit.predicate in same]


def symmetric_version(rule: Rule, recursive: Literal) -> Rule:
    '''Swap the head with the recursive body literal.'''
    body = tuple(rule.head if b is recursive else b for b in rule.body)
    return Rule(recursive.positive(), body, rule.min_from)


def validate(p: Program) -> ValidationReport:
    report = ValidationReport()
    stratum_of: Dict[str, int] = {}
    for i, stratum in enumerate(p.strata):
        for r in stratum:
            seen = stratum_of.setdefault(r.head.predicate, i)
            if seen != i:
                report.stratified = False
                report.errors.append(
                    f"predicate {r.head.predicate} is defined in strata {seen} and {i}")

    arities = p.arities()
    for r in p.rules:
        if r.head.predicate in p.edb:
            report.stratified = False
            report.errors.append(f"rule `{r}` defines EDB predicate {r.head.predicate}")
        for lit in [r.head] + r.literals:
            if lit.predicate not in arities:
                report.errors.append(f"predicate {lit.predicate} is never defined")
            elif arities[lit.predicate] != lit.arity:
                report.errors.append(f"predicate {lit.predicate} used with arity {lit.arity}, "
                                     f"expected {arities[lit.predicate]}")
        errors = range_restriction_errors(r)
        if errors:
            report.range_restricted = False
            report.errors.extend(errors)

    present = {r.canonical() for r in p.rules}
    for i, stratum in enumerate(p.strata):
        same = {r.head.predicate for r in stratum}
        for r in stratum:
            for lit in r.literals:
                j = stratum_of.get(lit.predicate)
                if j is None:
                    continue
                strict = lit.negated or r.is_min
                if j > i or (strict and j == i):
                    report.stratified = False
                    report.errors.append(
                        f"rule `{r}` in stratum {i} depends on {lit.predicate} (stratum {j})")
            recursive = _recursive_literal(r, same)
            if len(recursive) > 1:
                report.linear = False
                report.errors.append(f"rule `{r}` has {len(recursive)} recursive literals")
            elif len(recursive) == 1 and not recursive[0].negated:
                if symmetric_version(r, recursive[0]).canonical() not in present:
                    report.symmetric = False
                    report.errors.append(f"rule `{r}` has no symmetric counterpart")
    if not report.linear:
        report.symmetric = False
    return report


def check_program(p: Program) -> None:
    '''Raise if the program cannot be evaluated.'''
    report = validate(p)
    if not report.stratified:
        raise StratificationError('; '.join(report.errors))
    if not report.range_restricted:
        raise RangeRestrictionError('; '.join(report.errors))
