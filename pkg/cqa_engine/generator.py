#!/usr/bin/env python3
"""
Random Instances

Seeded generation of (query, database) pairs for the `gen` and `diff` commands and the
differential tests, plus random LONGCYCLE instances and greedy counterexample shrinking.

Query mix: key-join queries, queries with a planted M-cycle, and unrestricted queries;
coNP-complete draws are rejected. Databases are planted embeddings plus key-sharing noise,
bounded so that the repair oracle stays within its cap.
"""

import logging
import random
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Set, Tuple

from .attack_analysis import ComplexityClass, classify_complexity, has_key_join_property
from .core.database import Database, repair_count
from .core.evaluation import image
from .core.schema import Atom, Fact, Mode, Query
from .core.terms import Constant, Term, Valuation, Variable
from .errors import PreconditionError
from .longcycle import KPartiteGraph
from .mgraph import MCycle, find_mcycle
from .saturation import purify_all, saturate

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 200


@dataclass(frozen=True)
class GeneratorKnobs:
    max_atoms: int = 6
    max_arity: int = 4
    key_join_bias: float = 0.4
    mcycle_bias: float = 0.4
    consistent_bias: float = 0.15
    max_block_size: int = 3
    domain_size: int = 4
    embeddings: int = 3
    noise: int = 6
    repair_cap: int = 4096


def _relation_names(n: int) -> List[str]:
    return [f"R{i}" for i in range(n)]


def _free_query(rng: random.Random, knobs: GeneratorKnobs) -> Query:
    n = rng.randint(1, knobs.max_atoms)
    pool = [f"x{i}" for i in range(n + 1)]
    atoms = []
    for name in _relation_names(n):
        arity = rng.randint(1, knobs.max_arity)
        key_len = rng.randint(1, arity)
        terms: List[Term] = []
        for _ in range(arity):
            if rng.random() < 0.1:
                terms.append(Constant.number(rng.randrange(knobs.domain_size)))
            else:
                terms.append(Variable(rng.choice(pool)))
        mode = Mode.C if rng.random() < knobs.consistent_bias else Mode.I
        atoms.append(Atom.make(name, terms[:key_len], terms[key_len:], mode))
    return Query.of(atoms)


def _path_query(rng: random.Random, knobs: GeneratorKnobs) -> Query:
    '''R0(x0 | x1), R1(x1 | x2), ...: every pair joins on a full key.'''
    n = rng.randint(1, knobs.max_atoms)
    atoms = [Atom.make(name, [Variable(f"x{i}")], [Variable(f"x{i + 1}")])
             for i, name in enumerate(_relation_names(n))]
    return Query.of(atoms)


def _mcycle_query(rng: random.Random, knobs: GeneratorKnobs, hanging: bool = True) -> Query:
    '''F_i(x_i | x_{i+1}, ...) closed into a cycle, plus a few hanging atoms when `hanging`.'''
    k = rng.randint(2, max(2, min(4, knobs.max_atoms)))
    names = _relation_names(knobs.max_atoms)
    atoms = []
    for i in range(k):
        values: List[Term] = [Variable(f"x{(i + 1) % k}")]
        if rng.random() < 0.3 and knobs.max_arity > 2:
            values.append(Variable(f"y{rng.randrange(2)}"))
        atoms.append(Atom.make(names[i], [Variable(f"x{i}")], values))
    for name in names[k:rng.randint(k, knobs.max_atoms) if hanging else k]:
        key: List[Term] = [Variable(f"x{rng.randrange(k)}")]
        mode = Mode.C if rng.random() < knobs.consistent_bias else Mode.I
        atoms.append(Atom.make(name, key, [Variable(f"z{name}")], mode))
    return Query.of(atoms)


def random_query(rng: random.Random, knobs: Optional[GeneratorKnobs] = None) -> Query:
    '''A query outside coNP from the configured mix.'''
    knobs = knobs or GeneratorKnobs()
    draw = rng.random()
    for _ in range(MAX_ATTEMPTS):
        if draw < knobs.key_join_bias:
            q = _free_query(rng, knobs)
            if not has_key_join_property(q):
                continue
        elif draw < knobs.key_join_bias + knobs.mcycle_bias:
            q = _mcycle_query(rng, knobs)
        else:
            q = _free_query(rng, knobs)
        if classify_complexity(q) is not ComplexityClass.CONP_COMPLETE:
            return q
    logger.debug("Query sampling fell back to a path query")
    return _path_query(rng, knobs)


def _values_for(rng: random.Random, n: int, knobs: GeneratorKnobs) -> Tuple[Constant, ...]:
    return tuple(Constant.number(rng.randrange(knobs.domain_size)) for _ in range(n))


def random_database(rng: random.Random, q: Query,
                    knobs: Optional[GeneratorKnobs] = None) -> Database:
    '''Planted embeddings of q plus noise facts sharing keys with existing ones.'''
    knobs = knobs or GeneratorKnobs()
    facts: Set[Fact] = set()
    consistent: Dict[Tuple[str, Tuple[Constant, ...]], Fact] = {}

    def admissible(fact: Fact) -> bool:
        if fact.relation.mode is Mode.C and consistent.get(fact.block_id, fact) != fact:
            return False
        return sum(1 for f in facts if f.block_id == fact.block_id) < knobs.max_block_size

    names = sorted(q.vars)
    for _ in range(knobs.embeddings):
        theta = Valuation(dict(zip(names, _values_for(rng, len(names), knobs))))
        planted = set(image(q, theta)) - facts
        if not all(admissible(f) for f in planted):
            continue
        if repair_count(Database.of(facts | planted)) > knobs.repair_cap:
            continue
        for f in planted:
            if f.relation.mode is Mode.C:
                consistent[f.block_id] = f
        facts |= planted

    iatoms = q.iatoms
    for _ in range(knobs.noise if iatoms else 0):
        atom = rng.choice(iatoms)
        schema = atom.relation
        same_relation = [f for f in facts if f.name == atom.name]
        if same_relation and rng.random() < 0.7:
            key = rng.choice(sorted(same_relation)).key_values
        else:
            key = _values_for(rng, schema.key_len, knobs)
        block = [f for f in facts if f.block_id == (atom.name, key)]
        if len(block) >= knobs.max_block_size:
            continue
        fact = Fact(schema, key, _values_for(rng, schema.arity - schema.key_len, knobs))
        if fact in facts:
            continue
        facts.add(fact)
        if repair_count(Database.of(facts)) > knobs.repair_cap:
            facts.discard(fact)
    return Database.of(facts)


def random_instance(seed: int,
                    knobs: Optional[GeneratorKnobs] = None) -> Tuple[Query, Database]:
    rng = random.Random(seed)
    q = random_query(rng, knobs)
    return q, random_database(rng, q, knobs)


def random_cycle_instance(seed: int, knobs: Optional[GeneratorKnobs] = None
                          ) -> Tuple[Query, MCycle, Database]:
    '''A saturated query made of one M-cycle, its purified database and the cycle itself.'''
    knobs = knobs or GeneratorKnobs()
    rng = random.Random(seed)
    q = _mcycle_query(rng, knobs, hanging=False)
    db = random_database(rng, q, knobs)
    sat = saturate(q)
    if sat.changed:
        db = purify_all(db, q, sat)
        q = sat.query
    cycle = find_mcycle(q)
    if cycle is None:
        raise PreconditionError(f"seed {seed} gave {q} without an M-cycle")
    return q, cycle, db


def random_kpartite(rng: random.Random, k: int, max_vertices: int,
                    cycles: Optional[int] = None) -> KPartiteGraph:
    '''Union of random k-cycles over at most `max_vertices` vertices, so every edge is on one.'''
    per_part = max(1, max_vertices // k)
    parts = {(p, j): p for p in range(k) for j in range(per_part)}
    edges = set()
    for _ in range(cycles if cycles is not None else rng.randint(1, 2 * per_part + 1)):
        picks = [(p, rng.randrange(per_part)) for p in range(k)]
        for p in range(k):
            edges.add((picks[p], picks[(p + 1) % k]))
    return KPartiteGraph.from_edges(k, parts, sorted(edges))


def minimize_counterexample(q: Query, db: Database,
                            predicate: Callable[[Query, Database], bool]) -> Database:
    '''Greedily drop facts while `predicate` (the disagreement) still holds.'''
    current = db
    changed = True
    while changed:
        changed = False
        for fact in current.sorted_facts:
            candidate = current.difference([fact])
            if predicate(q, candidate):
                current = candidate
                changed = True
                break
    logger.info(f"Counterexample shrunk from {len(db)} to {len(current)} fact(s)")
    return current
