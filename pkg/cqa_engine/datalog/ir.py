#!/usr/bin/env python3
'''Datalog program representation: literals, comparisons, rules with an optional min group,
and programs as ordered strata.'''

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple, Union

from ..core.terms import Term, Variable, term_vars


def render_term(t: Term) -> str:
    return t.name if isinstance(t, Variable) else t.render()


@dataclass(frozen=True)
class Literal:
    predicate: str
    args: Tuple[Term, ...] = ()
    negated: bool = False

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def vars(self) -> FrozenSet[str]:
        return frozenset(term_vars(self.args))

    def positive(self) -> 'Literal':
        return Literal(self.predicate, self.args)

    def __str__(self) -> str:
        core = self.predicate
        if self.args:
            core += '(' + ', '.join(render_term(t) for t in self.args) + ')'
        return ('!' + core) if self.negated else core


@dataclass(frozen=True)
class Comparison:
    """Built-in vector (dis)equality; `op` is '=' or '!='."""
    op: str
    left: Tuple[Term, ...]
    right: Tuple[Term, ...]

    def __post_init__(self) -> None:
        if self.op not in ('=', '!='):
            raise ValueError(f"unknown comparison {self.op!r}")
        if len(self.left) != len(self.right) or not self.left:
            raise ValueError("comparison sides must be non-empty and of equal length")

    @property
    def vars(self) -> FrozenSet[str]:
        return frozenset(term_vars(self.left + self.right))

    def __str__(self) -> str:
        def side(ts: Tuple[Term, ...]) -> str:
            if len(ts) == 1:
                return render_term(ts[0])
            return '(' + ', '.join(render_term(t) for t in ts) + ')'
        return f"{side(self.left)} {self.op} {side(self.right)}"


BodyItem = Union[Literal, Comparison]


@dataclass(frozen=True)
class Rule:
    head: Literal
    body: Tuple[BodyItem, ...] = ()
    # head arguments from this position on are min-aggregated per group of the leading ones
    min_from: Optional[int] = None

    @property
    def is_min(self) -> bool:
        return self.min_from is not None

    @property
    def positive_literals(self) -> List[Literal]:
        return [b for b in self.body if isinstance(b, Literal) and not b.negated]

    @property
    def negative_literals(self) -> List[Literal]:
        return [b for b in self.body if isinstance(b, Literal) and b.negated]

    @property
    def comparisons(self) -> List[Comparison]:
        return [b for b in self.body if isinstance(b, Comparison)]

    @property
    def literals(self) -> List[Literal]:
        return [b for b in self.body if isinstance(b, Literal)]

    def canonical(self) -> Tuple[str, Optional[int], Tuple[str, ...]]:
        '''Head plus sorted body text; equal for rules that differ only in body order.'''
        return (str(self.head), self.min_from, tuple(sorted(str(b) for b in self.body)))

    def __str__(self) -> str:
        head = self.head.predicate
        if self.head.args:
            args = [render_term(t) for t in self.head.args]
            if self.min_from is not None:
                args = args[:self.min_from] + ['min(' + ', '.join(args[self.min_from:]) + ')']
            head += '(' + ', '.join(args) + ')'
        if not self.body:
            return head + '.'
        return head + ' :- ' + ', '.join(str(b) for b in self.body) + '.'


@dataclass
class Program:
    strata: List[List[Rule]]
    edb: Dict[str, int] = field(default_factory=dict)
    goal: Optional[str] = None
    manifest: Dict[str, str] = field(default_factory=dict)

    @property
    def rules(self) -> List[Rule]:
        return [r for stratum in self.strata for r in stratum]

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return sum(len(s) for s in self.strata)

    @property
    def idb_predicates(self) -> List[str]:
        seen: Dict[str, None] = {}
        for r in self.rules:
            seen.setdefault(r.head.predicate, None)
        return list(seen)

    def stratum_of(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for i, stratum in enumerate(self.strata):
            for r in stratum:
                out.setdefault(r.head.predicate, i)
        return out

    def arities(self) -> Dict[str, int]:
        out = dict(self.edb)
        for r in self.rules:
            out.setdefault(r.head.predicate, r.head.arity)
        return out

    def rules_for(self, predicate: str) -> List[Rule]:
        return [r for r in self.rules if r.head.predicate == predicate]
