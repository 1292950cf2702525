#!/usr/bin/env python3
"""
M-graphs and Instance Graphs

Schema level: the M-graph (F -> G when the mode-c FDs give vars(F) -> key(G)) and the choice of
an M-cycle inside an initial strong component of the attack graph.

Data level: the hook graph of a database, its restriction to one M-cycle, the block quotient
of that restriction, and the n-embeddings of the cycle.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterator, List, Optional, Set, Tuple

import networkx as nx

from .attack_analysis import attack_graph, has_strong_cycle, initial_strong_components
from .core.database import Database
from .core.evaluation import iter_embeddings
from .core.schema import Atom, BlockId, Fact, Query
from .core.terms import Valuation
from .errors import PreconditionError
from .fd_engine import FunctionalDependency, entails, fds_of

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MGraph:
    query: Query
    edges: FrozenSet[Tuple[str, str]]

    @property
    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.query.relation_names)
        g.add_edges_from(sorted(self.edges))
        return g

    def has_edge(self, source: str, target: str) -> bool:
        return (source, target) in self.edges


@lru_cache(maxsize=4096)
def m_graph(q: Query) -> MGraph:
    sigma = fds_of(q.catoms)
    edges = set()
    for f in q.atoms:
        for g in q.atoms:
            if f != g and entails(sigma, FunctionalDependency(f.vars, g.key_vars)):
                edges.add((f.name, g.name))
    return MGraph(q, frozenset(edges))


@dataclass(frozen=True)
class MCycle:
    """Elementary M-cycle F_0 -> F_1 -> ... -> F_{k-1} -> F_0."""
    atoms: Tuple[Atom, ...]

    def __post_init__(self) -> None:
        if len(self.atoms) < 2:
            raise PreconditionError("an M-cycle needs at least two atoms")
        if len({a.name for a in self.atoms}) != len(self.atoms):
            raise PreconditionError("an M-cycle must be elementary")

    @property
    def k(self) -> int:
        return len(self.atoms)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(a.name for a in self.atoms)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def successor(self, i: int) -> Atom:
        return self.atoms[(i + 1) % self.k]

    def edges(self) -> List[Tuple[str, str]]:
        return [(self.atoms[i].name, self.successor(i).name) for i in range(self.k)]

    def is_cycle_of(self, q: Query) -> bool:
        mg = m_graph(q)
        return all(a in q for a in self.atoms) and all(mg.has_edge(s, t) for s, t in self.edges())

    @classmethod
    def of(cls, q: Query, names: List[str]) -> 'MCycle':
        cycle = cls(tuple(q.atom(n) for n in names))
        if not cycle.is_cycle_of(q):
            raise PreconditionError(f"{' -> '.join(names)} is not an M-cycle of the query")
        return cycle

    def __str__(self) -> str:
        return ' -> '.join(self.names + (self.names[0],))


def _canonical(cycle: List[str]) -> Tuple[str, ...]:
    start = cycle.index(min(cycle))
    return tuple(cycle[start:] + cycle[:start])


def find_mcycle(q: Query) -> Optional[MCycle]:
    '''Shortest elementary M-cycle inside an initial strong component of the attack graph.'''
    g = attack_graph(q)
    unattacked = [a.name for a in q.iatoms if not g.attacked(a.name)]
    if unattacked:
        raise PreconditionError(f"mode-i atom(s) {', '.join(unattacked)} are unattacked")
    if has_strong_cycle(g):
        raise PreconditionError("the attack graph has a strong cycle")
    mg = m_graph(q).graph
    best: Optional[Tuple[int, Tuple[str, ...]]] = None
    for component in initial_strong_components(g):
        if len(component) < 2:
            continue
        for cycle in nx.simple_cycles(mg.subgraph(component)):
            if len(cycle) < 2:
                continue
            candidate = (len(cycle), _canonical(list(cycle)))
            if best is None or candidate < best:
                best = candidate
    if best is None:
        logger.debug(f"No M-cycle inside an initial strong component of {q.name}")
        return None
    return MCycle(tuple(q.atom(n) for n in best[1]))


@dataclass
class HookGraph:
    """Facts as vertices; A -> B when an embedding θ and M-edge F -> G give A = θ(F), B ~ θ(G)."""
    query: Query
    graph: nx.DiGraph
    cycle: Optional[MCycle] = None

    def edges(self) -> List[Tuple[Fact, Fact]]:
        return sorted(self.graph.edges, key=lambda e: (e[0].sort_key, e[1].sort_key))

    def facts(self) -> List[Fact]:
        return sorted(self.graph.nodes, key=lambda f: f.sort_key)

    def successors(self, fact: Fact) -> List[Fact]:
        return sorted(self.graph.successors(fact), key=lambda f: f.sort_key)


def _hook_edges(q: Query, db: Database, m_edges: List[Tuple[str, str]]) -> nx.DiGraph:
    g = nx.DiGraph()
    for theta in iter_embeddings(q, db):
        for source, target in m_edges:
            a = q.atom(source).ground(theta)
            for b in db.block_of(q.atom(target).ground(theta)):
                g.add_edge(a, b)
    return g


def hook_graph(q: Query, db: Database) -> HookGraph:
    mg = m_graph(q)
    g = _hook_edges(q, db, sorted(mg.edges))
    g.add_nodes_from(f for f in db.facts if f.name in q.by_name)
    return HookGraph(q, g)


def chook_graph(q: Query, cycle: MCycle, db: Database) -> HookGraph:
    '''Hook graph over the facts of the cycle's relations, using only the cycle's own edges.'''
    g = _hook_edges(q, db, cycle.edges())
    names = set(cycle.names)
    g.add_nodes_from(f for f in db.facts if f.name in names)
    for node in g.nodes:
        g.nodes[node]['part'] = cycle.index(node.name)
    return HookGraph(q, g, cycle)


@dataclass
class BlockQuotientGraph:
    cycle: MCycle
    graph: nx.DiGraph

    def edges(self) -> List[Tuple[BlockId, BlockId]]:
        return sorted(self.graph.edges, key=lambda e: (_block_key(e[0]), _block_key(e[1])))

    def blocks(self) -> List[BlockId]:
        return sorted(self.graph.nodes, key=_block_key)


def _block_key(block: BlockId) -> tuple:
    return (block[0], tuple(c.sort_key for c in block[1]))


def block_quotient(chg: HookGraph) -> BlockQuotientGraph:
    if chg.cycle is None:
        raise PreconditionError("block quotient needs a cycle-restricted hook graph")
    g = nx.DiGraph()
    for fact in chg.graph.nodes:
        g.add_node(fact.block_id, part=chg.cycle.index(fact.name))
    for a, b in chg.graph.edges:
        g.add_edge(a.block_id, b.block_id)
    return BlockQuotientGraph(chg.cycle, g)


@dataclass(frozen=True)
class Embedding:
    """An elementary hook cycle of length n*k, listed from its least F_0 fact."""
    facts: Tuple[Fact, ...]
    n: int
    relevant: Optional[bool] = None

    @property
    def blocks(self) -> FrozenSet[BlockId]:
        return frozenset(f.block_id for f in self.facts)

    def __str__(self) -> str:
        return ' -> '.join(str(f) for f in self.facts)


def _cycles_of_length(chg: HookGraph, length: int) -> Iterator[Tuple[Fact, ...]]:
    '''Elementary cycles of the given length through distinct blocks, rotated to start at their
    least F_0 fact.'''
    cycle = chg.cycle
    assert cycle is not None
    starts = sorted((f for f in chg.graph.nodes if f.name == cycle.names[0]),
                    key=lambda f: f.sort_key)
    for start in starts:
        path = [start]
        used: Set[BlockId] = {start.block_id}

        def extend(fact: Fact) -> Iterator[Tuple[Fact, ...]]:
            if len(path) == length:
                if chg.graph.has_edge(fact, start):
                    yield tuple(path)
                return
            for nxt in chg.successors(fact):
                if nxt.block_id in used:
                    continue
                if nxt.name == cycle.names[0] and nxt.sort_key < start.sort_key:
                    continue
                path.append(nxt)
                used.add(nxt.block_id)
                yield from extend(nxt)
                path.pop()
                used.discard(nxt.block_id)

        yield from extend(start)


def _relevant(q: Query, cycle: MCycle, facts: Tuple[Fact, ...], db: Database) -> bool:
    binding: Optional[Valuation] = Valuation()
    for atom, fact in zip(cycle.atoms, facts):
        binding = atom.match(fact, binding)
        if binding is None:
            return False
    for _ in iter_embeddings(q.without(*cycle.atoms), db, binding):
        return True
    return False


def one_embeddings(q: Query, cycle: MCycle, db: Database,
                   chg: Optional[HookGraph] = None) -> Tuple[List[Embedding], List[Embedding]]:
    '''1-embeddings split into (relevant, irrelevant).'''
    chg = chg or chook_graph(q, cycle, db)
    relevant: List[Embedding] = []
    irrelevant: List[Embedding] = []
    for facts in _cycles_of_length(chg, cycle.k):
        if _relevant(q, cycle, facts, db):
            relevant.append(Embedding(facts, 1, True))
        else:
            irrelevant.append(Embedding(facts, 1, False))
    return relevant, irrelevant


def n_embeddings(q: Query, cycle: MCycle, db: Database, n: int,
                 chg: Optional[HookGraph] = None) -> List[Embedding]:
    if n < 1:
        return []
    chg = chg or chook_graph(q, cycle, db)
    if n * cycle.k > chg.graph.number_of_nodes():
        return []
    return [Embedding(facts, n) for facts in _cycles_of_length(chg, n * cycle.k)]


@dataclass
class HookLemmaReport:
    violations: List[str] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.violations


def check_hook_lemma(hg: HookGraph, db: Database) -> HookLemmaReport:
    '''Successors of a fact are closed under key-equality and pairwise key-equal per relation.'''
    report = HookLemmaReport()
    for a in hg.facts():
        succ = hg.successors(a)
        for b in succ:
            for b2 in db.block_of(b):
                if not hg.graph.has_edge(a, b2):
                    report.violations.append(f"{a} -> {b} but not -> {b2}")
        by_relation: Dict[str, Set[BlockId]] = {}
        for b in succ:
            by_relation.setdefault(b.name, set()).add(b.block_id)
        for name, found in by_relation.items():
            if len(found) > 1:
                report.violations.append(f"{a} has {len(found)} {name}-successor blocks")
    return report
