#!/usr/bin/env python3
'''Databases, blocks and repairs.'''

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from math import prod
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Set, Tuple

from ..config import DEFAULT_REPAIR_CAP
from ..errors import DatabaseError, OracleInfeasibleError
from .schema import BlockId, Fact, Mode, RelationSchema
from .terms import Constant

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Database:
    """An immutable set of facts, indexed by relation and by block."""
    facts: FrozenSet[Fact] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, 'facts', frozenset(self.facts))
        signatures: Dict[str, RelationSchema] = {}
        for f in self.facts:
            seen = signatures.setdefault(f.name, f.relation)
            if seen != f.relation:
                raise DatabaseError(f"relation {f.name} used with signatures "
                                    f"{seen.signature} and {f.relation.signature}")
        for block, members in self.blocks.items():
            if len(members) > 1 and members[0].relation.mode is Mode.C:
                raise DatabaseError(f"mode-c relation {block[0]} has {len(members)} "
                                    f"key-equal facts for key "
                                    f"({', '.join(c.label() for c in block[1])})")

    @classmethod
    def of(cls, facts: Iterable[Fact]) -> 'Database':
        return cls(frozenset(facts))

    def __len__(self) -> int:
        return len(self.facts)

    def __iter__(self) -> Iterator[Fact]:
        return iter(self.sorted_facts)

    def __contains__(self, fact: object) -> bool:
        return fact in self.facts

    @cached_property
    def sorted_facts(self) -> Tuple[Fact, ...]:
        return tuple(sorted(self.facts, key=lambda f: f.sort_key))

    @cached_property
    def by_relation(self) -> Dict[str, Tuple[Fact, ...]]:
        out: Dict[str, List[Fact]] = {}
        for f in self.sorted_facts:
            out.setdefault(f.name, []).append(f)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def blocks(self) -> Dict[BlockId, Tuple[Fact, ...]]:
        out: Dict[BlockId, List[Fact]] = {}
        for f in sorted(self.facts, key=lambda f: f.sort_key):
            out.setdefault(f.block_id, []).append(f)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def schemas(self) -> Dict[str, RelationSchema]:
        return {f.name: f.relation for f in self.facts}

    def facts_of(self, relation: str) -> Tuple[Fact, ...]:
        return self.by_relation.get(relation, ())

    def block_of(self, fact: Fact) -> Tuple[Fact, ...]:
        return self.blocks.get(fact.block_id, ())

    def block(self, block: BlockId) -> Tuple[Fact, ...]:
        return self.blocks.get(block, ())

    @property
    def is_consistent(self) -> bool:
        return all(len(b) == 1 for b in self.blocks.values())

    def union(self, other: Iterable[Fact]) -> 'Database':
        return Database(self.facts | frozenset(other))

    def difference(self, other: Iterable[Fact]) -> 'Database':
        return Database(self.facts - frozenset(other))

    def without_blocks(self, blocks: Iterable[BlockId]) -> 'Database':
        drop = set(blocks)
        return Database(frozenset(f for f in self.facts if f.block_id not in drop))

    def restrict(self, relations: Iterable[str]) -> 'Database':
        keep = set(relations)
        return Database(frozenset(f for f in self.facts if f.name in keep))

    def drop_relations(self, relations: Iterable[str]) -> 'Database':
        drop = set(relations)
        return Database(frozenset(f for f in self.facts if f.name not in drop))


def blocks(db: Database) -> Dict[BlockId, Tuple[Fact, ...]]:
    '''Partition of the facts into maximal sets of key-equal facts.'''
    return dict(db.blocks)


def repair_count(db: Database) -> int:
    return prod(len(b) for b in db.blocks.values())


def enumerate_repairs(db: Database, cap: Optional[int] = None) -> Iterator[Database]:
    '''Yield every repair: one fact per block.'''
    limit = DEFAULT_REPAIR_CAP if cap is None else cap
    total = repair_count(db)
    if total > limit:
        raise OracleInfeasibleError(f"oracle infeasible: {total} repairs exceed cap {limit}")
    logger.debug(f"Enumerating {total} repairs over {len(db.blocks)} blocks")
    choices = [db.blocks[b] for b in sorted(db.blocks, key=_block_sort_key)]
    for pick in itertools.product(*choices):
        yield Database(frozenset(pick))


def _block_sort_key(block: BlockId) -> tuple:
    return (block[0], tuple(c.sort_key for c in block[1]))


def is_repair(candidate: Database, db: Database) -> bool:
    '''Consistent, contained in db and maximal.'''
    if not candidate.facts <= db.facts or not candidate.is_consistent:
        return False
    covered = {f.block_id for f in candidate.facts}
    return covered == set(db.blocks)


def database_to_edb(db: Database) -> Dict[str, Set[Tuple[Constant, ...]]]:
    '''Relation store view: key columns followed by value columns.'''
    out: Dict[str, Set[Tuple[Constant, ...]]] = {}
    for f in db.facts:
        out.setdefault(f.name, set()).add(f.values)
    return out


def edb_to_database(relations: Mapping[str, Iterable[Tuple[Constant, ...]]],
                    schemas: Mapping[str, RelationSchema]) -> Database:
    '''Inverse of database_to_edb for relations whose schema is known.'''
    facts = []
    for name, rows in relations.items():
        schema = schemas[name]
        for row in rows:
            facts.append(Fact(schema, tuple(row[:schema.key_len]), tuple(row[schema.key_len:])))
    return Database.of(facts)


def sort_blocks(block_ids: Iterable[BlockId]) -> List[BlockId]:
    return sorted(block_ids, key=_block_sort_key)
