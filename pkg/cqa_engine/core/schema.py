#!/usr/bin/env python3
'''Relation schemas, atoms, queries and facts.'''

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from ..errors import SchemaError
from .terms import Constant, Term, Valuation, Variable, term_vars


class Mode(Enum):
    """Relation modes: c relations are always consistent, i relations may violate their key."""
    C = "c"
    I = "i"  # noqa: E741


@dataclass(frozen=True)
class RelationSchema:
    name: str
    arity: int
    key_len: int
    mode: Mode = Mode.I

    def __post_init__(self) -> None:
        if self.arity < 1:
            raise SchemaError(f"relation {self.name}: arity must be positive")
        if not 1 <= self.key_len <= self.arity:
            raise SchemaError(
                f"relation {self.name}: key length {self.key_len} out of range 1..{self.arity}")

    @property
    def signature(self) -> str:
        suffix = '@c' if self.mode is Mode.C else ''
        return f"{self.name}{suffix}[{self.arity},{self.key_len}]"


@dataclass(frozen=True)
class Atom:
    relation: RelationSchema
    key_terms: Tuple[Term, ...]
    value_terms: Tuple[Term, ...] = ()

    def __post_init__(self) -> None:
        if len(self.key_terms) != self.relation.key_len:
            raise SchemaError(f"atom {self.name}: expected {self.relation.key_len} key terms, "
                              f"got {len(self.key_terms)}")
        if len(self.key_terms) + len(self.value_terms) != self.relation.arity:
            raise SchemaError(f"atom {self.name}: expected {self.relation.arity} terms, "
                              f"got {len(self.key_terms) + len(self.value_terms)}")

    @classmethod
    def make(cls, name: str, key: Sequence[Term], values: Sequence[Term] = (),
             mode: Mode = Mode.I) -> 'Atom':
        schema = RelationSchema(name, len(key) + len(values), len(key), mode)
        return cls(schema, tuple(key), tuple(values))

    @property
    def name(self) -> str:
        return self.relation.name

    @property
    def mode(self) -> Mode:
        return self.relation.mode

    @property
    def is_consistent(self) -> bool:
        return self.relation.mode is Mode.C

    @property
    def terms(self) -> Tuple[Term, ...]:
        return self.key_terms + self.value_terms

    @cached_property
    def key_vars(self) -> FrozenSet[str]:
        return frozenset(term_vars(self.key_terms))

    @cached_property
    def vars(self) -> FrozenSet[str]:
        return frozenset(term_vars(self.terms))

    @property
    def ordered_vars(self) -> Tuple[str, ...]:
        return term_vars(self.terms)

    @property
    def has_constant_key(self) -> bool:
        return not self.key_vars

    def substitute(self, valuation: Mapping[str, Term]) -> 'Atom':
        def sub(t: Term) -> Term:
            if isinstance(t, Variable) and t.name in valuation:
                return valuation[t.name]
            return t
        return Atom(self.relation,
                    tuple(sub(t) for t in self.key_terms),
                    tuple(sub(t) for t in self.value_terms))

    def match(self, fact: 'Fact', base: Optional[Mapping[str, Constant]] = None
              ) -> Optional[Valuation]:
        '''Extend `base` so that the atom maps onto `fact`, or None if impossible.'''
        if fact.relation.name != self.name:
            return None
        binding: Dict[str, Constant] = dict(base or {})
        for term, value in zip(self.terms, fact.values):
            if isinstance(term, Variable):
                bound = binding.get(term.name)
                if bound is None:
                    binding[term.name] = value
                elif bound != value:
                    return None
            elif term != value:
                return None
        return Valuation(binding)

    def ground(self, valuation: Valuation) -> 'Fact':
        return Fact(self.relation, valuation.values_of(self.key_terms),
                    valuation.values_of(self.value_terms))

    def __str__(self) -> str:
        mode = '@c' if self.is_consistent else ''
        key = ', '.join(_render_term(t) for t in self.key_terms)
        vals = ', '.join(_render_term(t) for t in self.value_terms)
        return f"{self.name}{mode}({key} | {vals})" if vals else f"{self.name}{mode}({key} |)"


def _render_term(t: Term) -> str:
    return t.name if isinstance(t, Variable) else t.render()


@dataclass(frozen=True)
class Query:
    """A self-join-free Boolean conjunctive query; atoms are kept sorted by relation name."""
    atoms: Tuple[Atom, ...] = ()
    name: str = 'q'

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.atoms, key=lambda a: a.name))
        names = [a.name for a in ordered]
        for i in range(1, len(names)):
            if names[i] == names[i - 1]:
                raise SchemaError(f"self-join on relation {names[i]}")
        object.__setattr__(self, 'atoms', ordered)

    @classmethod
    def of(cls, atoms: Iterable[Atom], name: str = 'q') -> 'Query':
        return cls(tuple(atoms), name)

    def __iter__(self):
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __contains__(self, atom: object) -> bool:
        return atom in self.atoms

    @cached_property
    def by_name(self) -> Dict[str, Atom]:
        return {a.name: a for a in self.atoms}

    def atom(self, name: str) -> Atom:
        try:
            return self.by_name[name]
        except KeyError:
            raise SchemaError(f"query has no atom over relation {name}")

    @property
    def relation_names(self) -> Tuple[str, ...]:
        return tuple(a.name for a in self.atoms)

    @cached_property
    def schemas(self) -> Dict[str, RelationSchema]:
        return {a.name: a.relation for a in self.atoms}

    @cached_property
    def vars(self) -> FrozenSet[str]:
        out: set = set()
        for a in self.atoms:
            out |= a.vars
        return frozenset(out)

    @property
    def catoms(self) -> Tuple[Atom, ...]:
        return tuple(a for a in self.atoms if a.is_consistent)

    @property
    def iatoms(self) -> Tuple[Atom, ...]:
        return tuple(a for a in self.atoms if not a.is_consistent)

    def without(self, *atoms: Atom) -> 'Query':
        drop = {a.name for a in atoms}
        return Query(tuple(a for a in self.atoms if a.name not in drop), self.name)

    def with_atoms(self, *atoms: Atom) -> 'Query':
        return Query(self.atoms + tuple(atoms), self.name)

    def substitute(self, valuation: Mapping[str, Term]) -> 'Query':
        return Query(tuple(a.substitute(valuation) for a in self.atoms), self.name)

    def fresh_name(self, base: str, taken: Iterable[str] = ()) -> str:
        '''A relation name derived from `base` not used by this query nor in `taken`.'''
        used = set(self.relation_names) | set(taken)
        if base not in used:
            return base
        i = 1
        while f"{base}_{i}" in used:
            i += 1
        return f"{base}_{i}"

    def fresh_var(self, base: str, taken: Iterable[str] = ()) -> str:
        used = set(self.vars) | set(taken)
        if base not in used:
            return base
        i = 1
        while f"{base}_{i}" in used:
            i += 1
        return f"{base}_{i}"

    def __str__(self) -> str:
        return f"{self.name} :- " + ', '.join(str(a) for a in self.atoms) + '.'


@dataclass(frozen=True)
class Fact:
    relation: RelationSchema
    key_values: Tuple[Constant, ...]
    value_values: Tuple[Constant, ...] = ()

    def __post_init__(self) -> None:
        if len(self.key_values) != self.relation.key_len or \
                len(self.key_values) + len(self.value_values) != self.relation.arity:
            raise SchemaError(f"fact over {self.relation.name} does not match "
                              f"signature {self.relation.signature}")

    @classmethod
    def make(cls, relation: RelationSchema, key: Sequence[object],
             values: Sequence[object] = ()) -> 'Fact':
        return cls(relation, tuple(Constant.of(v) for v in key),
                   tuple(Constant.of(v) for v in values))

    @property
    def name(self) -> str:
        return self.relation.name

    @property
    def values(self) -> Tuple[Constant, ...]:
        return self.key_values + self.value_values

    @property
    def block_id(self) -> Tuple[str, Tuple[Constant, ...]]:
        return (self.relation.name, self.key_values)

    def key_equal(self, other: 'Fact') -> bool:
        return self.block_id == other.block_id

    @property
    def sort_key(self) -> tuple:
        return (self.relation.name, tuple(c.sort_key for c in self.values))

    def __lt__(self, other: 'Fact') -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        key = ', '.join(c.label() for c in self.key_values)
        vals = ', '.join(c.label() for c in self.value_values)
        return f"{self.name}({key} | {vals})" if vals else f"{self.name}({key} |)"


BlockId = Tuple[str, Tuple[Constant, ...]]


def block_label(block: BlockId) -> str:
    name, key = block
    return f"{name}({', '.join(c.label() for c in key)}, *)"


def sort_atoms(atoms: Iterable[Atom]) -> List[Atom]:
    return sorted(atoms, key=lambda a: a.name)
