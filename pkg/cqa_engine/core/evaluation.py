#!/usr/bin/env python3
'''Boolean conjunctive query evaluation by backtracking join.'''

from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

from .database import Database
from .schema import Atom, Fact, Query
from .terms import Constant, Valuation


def _order_atoms(atoms: Sequence[Atom], db: Database) -> List[Atom]:
    '''Greedy join order: most already-bound variables first, then the smaller relation.'''
    remaining = list(atoms)
    bound: Set[str] = set()
    order: List[Atom] = []
    while remaining:
        def score(a: Atom) -> tuple:
            shared = len(a.vars & bound)
            key_bound = a.key_vars <= bound
            return (not key_bound, -shared, len(db.facts_of(a.name)), a.name)
        best = min(remaining, key=score)
        remaining.remove(best)
        order.append(best)
        bound |= best.vars
    return order


def _key_index(db: Database, atom: Atom) -> Dict[Tuple[Constant, ...], Tuple[Fact, ...]]:
    return {block[1]: facts for block, facts in db.blocks.items() if block[0] == atom.name}


def iter_embeddings(q: Query, db: Database,
                    base: Optional[Valuation] = None) -> Iterator[Valuation]:
    '''Yield every valuation over vars(q) with θ(q) ⊆ db.'''
    order = _order_atoms(q.atoms, db)
    indexes = {a.name: _key_index(db, a) for a in order}

    def extend(i: int, binding: Valuation) -> Iterator[Valuation]:
        if i == len(order):
            yield binding
            return
        atom = order[i]
        candidates: Sequence[Fact]
        if atom.key_vars <= set(binding):
            key = tuple(binding.apply(t) for t in atom.key_terms)
            candidates = indexes[atom.name].get(key, ())  # type: ignore[arg-type]
        else:
            candidates = db.facts_of(atom.name)
        for fact in candidates:
            nxt = atom.match(fact, binding)
            if nxt is not None:
                yield from extend(i + 1, nxt)

    yield from extend(0, base or Valuation())


def eval_bcq(q: Query, db: Database) -> Tuple[bool, FrozenSet[Valuation]]:
    '''Return whether some valuation embeds q into db, with all embedding valuations.'''
    found = frozenset(iter_embeddings(q, db))
    return bool(found), found


def satisfies(q: Query, db: Database) -> bool:
    '''Short-circuit form of eval_bcq.'''
    for _ in iter_embeddings(q, db):
        return True
    return False


def image(q: Query, valuation: Valuation) -> Tuple[Fact, ...]:
    '''θ(q) as a tuple of facts, in atom order.'''
    return tuple(a.ground(valuation) for a in q.atoms)


