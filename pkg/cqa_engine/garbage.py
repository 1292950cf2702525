#!/usr/bin/env python3
"""
Garbage Sets

The maximal garbage set of an M-cycle C in a database: the largest union of C-blocks that
can be thrown away without changing the certain answer. `maximal_garbage_set` computes it by
the seed-and-close fixpoint that the generated Datalog program also follows;
`garbage_oracle` checks the definition directly on small inputs.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .config import DEFAULT_GARBAGE_ORACLE_BLOCK_CAP
from .core.database import Database, sort_blocks
from .core.evaluation import iter_embeddings
from .core.schema import Atom, BlockId, Fact, Query
from .core.terms import Constant, ConstantOrder
from .errors import OracleInfeasibleError
from .longcycle import KPartiteGraph, longcycle
from .mgraph import Embedding, HookGraph, MCycle, chook_graph, n_embeddings, one_embeddings

logger = logging.getLogger(__name__)


@dataclass
class SurvivingComponent:
    """A strong component of the C-hook graph that is left after garbage removal."""
    identifier: Tuple[Constant, ...]
    facts: Tuple[Fact, ...]
    embeddings: Tuple[Embedding, ...]


@dataclass
class GarbageReport:
    cycle: MCycle
    garbage_blocks: FrozenSet[BlockId]
    garbage_facts: FrozenSet[Fact]
    surviving_components: List[SurvivingComponent] = field(default_factory=list)
    seeds: Dict[str, FrozenSet[BlockId]] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.garbage_facts)

    def summary(self) -> str:
        parts = [f"{reason}={len(blocks)}" for reason, blocks in self.seeds.items()]
        return (f"blocks={len(self.garbage_blocks)} facts={self.size} "
                f"components={len(self.surviving_components)} " + ' '.join(parts)).strip()


def relevant_quotient(cycle: MCycle, relevant: Sequence[Embedding]) -> KPartiteGraph:
    '''Block quotient restricted to the edges of relevant 1-embeddings.'''
    parts: Dict[BlockId, int] = {}
    edges = set()
    for emb in relevant:
        blocks = [f.block_id for f in emb.facts]
        for i, block in enumerate(blocks):
            parts[block] = i
            edges.add((block, blocks[(i + 1) % cycle.k]))
    ordered = {b: parts[b] for b in sort_blocks(parts)}
    return KPartiteGraph.from_edges(cycle.k, ordered, sorted(edges, key=_edge_key))


def _edge_key(edge: Tuple[BlockId, BlockId]) -> tuple:
    return tuple((b[0], tuple(c.sort_key for c in b[1])) for b in edge)


def _long_cycle_blocks(cycle: MCycle, relevant: Sequence[Embedding]) -> Set[BlockId]:
    quotient = relevant_quotient(cycle, relevant)
    out: Set[BlockId] = set()
    for component in nx.strongly_connected_components(quotient.graph):
        if len(component) < 2 * cycle.k:
            continue
        sub = KPartiteGraph(cycle.k, quotient.graph.subgraph(component).copy())
        if longcycle(sub):
            out |= set(component)
    return out


def _close(q: Query, cycle: MCycle, db: Database, seed: Set[BlockId]) -> Set[BlockId]:
    '''Add every C-block of an embedding that already touches the set.'''
    images = []
    for theta in iter_embeddings(q, db):
        images.append({a.ground(theta).block_id for a in cycle.atoms})
    garbage = set(seed)
    changed = True
    while changed:
        changed = False
        for blocks in images:
            if blocks & garbage and not blocks <= garbage:
                garbage |= blocks
                changed = True
    return garbage


def maximal_garbage_set(q: Query, cycle: MCycle, db: Database,
                        order: ConstantOrder = ConstantOrder.ASCENDING) -> GarbageReport:
    chg = chook_graph(q, cycle, db)
    k = cycle.k
    seeds: Dict[str, Set[BlockId]] = {}

    # facts with outdegree 0 are never part of an embedding, so this covers them too
    good = {a.ground(theta) for theta in iter_embeddings(q, db) for a in cycle.atoms}
    seeds['no_embedding'] = {f.block_id for f in chg.graph.nodes if f not in good}
    relevant, irrelevant = one_embeddings(q, cycle, db, chg)
    seeds['irrelevant'] = {b for emb in irrelevant for b in emb.blocks}
    multi: Set[BlockId] = set()
    for n in range(2, 2 * k - 2):
        for emb in n_embeddings(q, cycle, db, n, chg):
            multi |= emb.blocks
    seeds['n_embedding'] = multi
    seeds['long_cycle'] = _long_cycle_blocks(cycle, relevant)

    seed: Set[BlockId] = set().union(*seeds.values())
    garbage = _close(q, cycle, db, seed)
    facts = frozenset(f for b in garbage for f in db.block(b))
    logger.debug(f"Garbage for {cycle}: seeds " +
                 ', '.join(f"{r}={len(s)}" for r, s in seeds.items()) +
                 f"; closed to {len(garbage)} block(s)")

    report = GarbageReport(cycle, frozenset(garbage), facts,
                           seeds={r: frozenset(s) for r, s in seeds.items()})
    report.surviving_components = surviving_components(q, cycle, db.difference(facts), order)
    return report


def surviving_components(q: Query, cycle: MCycle, db: Database,
                         order: ConstantOrder = ConstantOrder.ASCENDING
                         ) -> List[SurvivingComponent]:
    '''Strong components of the C-hook graph of db, each named by its least F_0 key.'''
    chg = chook_graph(q, cycle, db)
    relevant, _ = one_embeddings(q, cycle, db, chg)
    out = []
    for component in nx.strongly_connected_components(chg.graph):
        roots = [f.key_values for f in component if f.name == cycle.names[0]]
        if not roots:
            continue
        ident = min(roots, key=order.key)
        members = tuple(sorted(component, key=lambda f: f.sort_key))
        embs = tuple(e for e in relevant if e.facts[0] in component)
        out.append(SurvivingComponent(ident, members, embs))
    return sorted(out, key=lambda c: order.key(c.identifier))


class _RepairSearch:
    """Is there a repair r of o such that no embedding touching o has all its o-facts in r?"""

    def __init__(self, db: Database, chosen: Sequence[BlockId],
                 images: Sequence[FrozenSet[Fact]]):
        self.order = list(chosen)
        self.position = {b: i for i, b in enumerate(self.order)}
        self.options = [db.block(b) for b in self.order]
        chosen_set = set(chosen)
        self.constraints: List[List[Tuple[int, Fact]]] = []
        for image in images:
            touched = [(self.position[f.block_id], f) for f in image if f.block_id in chosen_set]
            if not touched:
                continue
            slots = {}
            clash = False
            for pos, fact in touched:
                if slots.setdefault(pos, fact) != fact:
                    clash = True
            if not clash:
                self.constraints.append(sorted(slots.items(), key=lambda t: t[0]))
        self.by_last: Dict[int, List[List[Tuple[int, Fact]]]] = {}
        for c in self.constraints:
            self.by_last.setdefault(c[-1][0], []).append(c)

    def solve(self) -> Optional[Dict[int, Fact]]:
        pick: Dict[int, Fact] = {}

        def assign(i: int) -> bool:
            if i == len(self.order):
                return True
            for fact in self.options[i]:
                pick[i] = fact
                if all(any(pick[p] != f for p, f in c) for c in self.by_last.get(i, ())):
                    if assign(i + 1):
                        return True
            pick.pop(i, None)
            return False

        return dict(pick) if assign(0) else None


def is_garbage_set(q: Query, q0: Sequence[Atom], db: Database, chosen: Sequence[BlockId],
                   images: Optional[Sequence[FrozenSet[Fact]]] = None) -> bool:
    '''Check the garbage-set definition for the union of the given q0 blocks.'''
    if images is None:
        images = [frozenset(a.ground(t) for a in q0) for t in iter_embeddings(q, db)]
    return _RepairSearch(db, chosen, images).solve() is not None


def garbage_oracle(q: Query, q0: Sequence[Atom], db: Database,
                   cap: int = DEFAULT_GARBAGE_ORACLE_BLOCK_CAP) -> FrozenSet[BlockId]:
    '''Maximal garbage set by trying unions of q0 blocks from the largest down.'''
    names = {a.name for a in q0}
    candidates = sort_blocks(b for b in db.blocks if b[0] in names)
    if len(candidates) > cap:
        raise OracleInfeasibleError(
            f"oracle infeasible: {len(candidates)} blocks exceed cap {cap}")
    images = [frozenset(a.ground(t) for a in q0) for t in iter_embeddings(q, db)]
    for size in range(len(candidates), 0, -1):
        for chosen in combinations(candidates, size):
            if is_garbage_set(q, q0, db, chosen, images):
                logger.debug(f"Garbage oracle: maximal set has {size} block(s)")
                return frozenset(chosen)
    return frozenset()


def hook_graph_after(q: Query, cycle: MCycle, db: Database, report: GarbageReport) -> HookGraph:
    '''C-hook graph of the database with the garbage removed.'''
    return chook_graph(q, cycle, db.difference(report.garbage_facts))
