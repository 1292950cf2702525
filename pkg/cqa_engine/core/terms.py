#!/usr/bin/env python3
'''Constants, variables and valuations.

Constants are totally ordered: numbers before texts before tuples; numbers by value,
texts bytewise, tuples lexicographically.
'''

import re
from dataclasses import dataclass
from enum import Enum
from functools import total_ordering
from typing import Any, Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

_BARE_TEXT = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')


class ConstantKind(Enum):
    """Constant kinds in their order of precedence."""
    NUMBER = 0
    TEXT = 1
    TUPLE = 2


class ConstantOrder(Enum):
    """Direction of the total order used by min-aggregation and identifier choice."""
    ASCENDING = "ascending"
    DESCENDING = "descending"

    def key(self, values: Sequence['Constant']) -> Any:
        '''Sort key for a vector of constants under this order.'''
        natural = tuple(c.sort_key for c in values)
        if self is ConstantOrder.ASCENDING:
            return natural
        return _Reversed(natural)


@total_ordering
class _Reversed:
    __slots__ = ('value',)

    def __init__(self, value: Any):
        self.value = value

    def __eq__(self, other: object) -> bool:
        return isinstance(other, _Reversed) and self.value == other.value

    def __lt__(self, other: '_Reversed') -> bool:
        return other.value < self.value


@total_ordering
@dataclass(frozen=True)
class Constant:
    """A ground value."""
    kind: ConstantKind
    value: Union[int, bytes, Tuple['Constant', ...]]

    @classmethod
    def number(cls, n: int) -> 'Constant':
        return cls(ConstantKind.NUMBER, int(n))

    @classmethod
    def text(cls, s: Union[str, bytes]) -> 'Constant':
        if isinstance(s, str):
            s = s.encode('utf-8')
        return cls(ConstantKind.TEXT, bytes(s))

    @classmethod
    def tuple_of(cls, items: Iterable['Constant']) -> 'Constant':
        return cls(ConstantKind.TUPLE, tuple(items))

    @classmethod
    def of(cls, value: Any) -> 'Constant':
        '''Build a constant from a plain Python value.'''
        if isinstance(value, Constant):
            return value
        if isinstance(value, bool):
            raise TypeError("booleans are not constants")
        if isinstance(value, int):
            return cls.number(value)
        if isinstance(value, (str, bytes)):
            return cls.text(value)
        if isinstance(value, (tuple, list)):
            return cls.tuple_of(cls.of(v) for v in value)
        raise TypeError(f"cannot build a constant from {value!r}")

    @property
    def sort_key(self) -> Tuple[int, Any]:
        if self.kind is ConstantKind.TUPLE:
            return (2, tuple(c.sort_key for c in self.value))  # type: ignore[union-attr]
        return (self.kind.value, self.value)

    def __lt__(self, other: 'Constant') -> bool:
        if not isinstance(other, Constant):
            return NotImplemented
        return self.sort_key < other.sort_key

    def render(self) -> str:
        '''Source syntax, always re-parseable.'''
        if self.kind is ConstantKind.NUMBER:
            return str(self.value)
        if self.kind is ConstantKind.TEXT:
            return _quote(self.value)  # type: ignore[arg-type]
        return '(' + ', '.join(c.render() for c in self.value) + ')'  # type: ignore[union-attr]

    def label(self) -> str:
        '''Short human-readable form used in reports and DOT labels.'''
        if self.kind is ConstantKind.TEXT:
            try:
                text = self.value.decode('utf-8')  # type: ignore[union-attr]
            except UnicodeDecodeError:
                return self.render()
            if _BARE_TEXT.match(text):
                return text
            return self.render()
        if self.kind is ConstantKind.TUPLE:
            return '(' + ','.join(c.label() for c in self.value) + ')'  # type: ignore[union-attr]
        return str(self.value)

    def __str__(self) -> str:
        return self.label()

    def __repr__(self) -> str:
        return f"Constant({self.render()})"


def _quote(raw: bytes) -> str:
    out = ['"']
    for b in raw:
        ch = chr(b)
        if ch == '"' or ch == '\\':
            out.append('\\' + ch)
        elif 32 <= b < 127:
            out.append(ch)
        else:
            out.append(f'\\x{b:02x}')
    out.append('"')
    return ''.join(out)


@dataclass(frozen=True, order=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Variable, Constant]


def is_variable(term: Term) -> bool:
    return isinstance(term, Variable)


def term_vars(terms: Iterable[Term]) -> Tuple[str, ...]:
    '''Variable names in order of first occurrence.'''
    seen: Dict[str, None] = {}
    for t in terms:
        if isinstance(t, Variable):
            seen.setdefault(t.name, None)
    return tuple(seen)


class Valuation(Mapping[str, Constant]):
    """An immutable, hashable mapping from variable names to constants."""

    __slots__ = ('_items', '_hash')

    def __init__(self, items: Optional[Union[Mapping[str, Constant],
                                              Iterable[Tuple[str, Constant]]]] = None):
        data = dict(items or {})
        self._items: Dict[str, Constant] = data
        self._hash: Optional[int] = None

    def __getitem__(self, key: str) -> Constant:
        return self._items[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._items.items()))
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Valuation):
            return self._items == other._items
        if isinstance(other, Mapping):
            return self._items == dict(other)
        return NotImplemented

    def __repr__(self) -> str:
        body = ', '.join(f"{k}={v.label()}" for k, v in sorted(self._items.items()))
        return f"Valuation({body})"

    def apply(self, term: Term) -> Term:
        '''Identity outside the domain.'''
        if isinstance(term, Variable):
            return self._items.get(term.name, term)
        return term

    def extend(self, more: Mapping[str, Constant]) -> 'Valuation':
        merged = dict(self._items)
        merged.update(more)
        return Valuation(merged)

    def restrict(self, names: Iterable[str]) -> 'Valuation':
        return Valuation({n: self._items[n] for n in names if n in self._items})

    def values_of(self, terms: Sequence[Term]) -> Tuple[Constant, ...]:
        '''Ground a term vector; every variable must be in the domain.'''
        out = []
        for t in terms:
            g = self.apply(t)
            if not isinstance(g, Constant):
                raise KeyError(f"variable {t} is not in the valuation domain")
            out.append(g)
        return tuple(out)
