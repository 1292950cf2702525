#!/usr/bin/env python3
"""
LONGCYCLE(k)

Decides whether a k-partite directed graph in which every edge lies on a k-cycle has an
elementary directed cycle of length at least 2k. Two tests are combined:

1. an elementary cycle of length n*k for some 2 <= n <= 2k-3, found by bounded search
2. a chordless cycle of length >= 2k in the k-cycle intersection graph, found as an induced
   path P1..P2k closed either directly or through vertices that avoid the path's interior

`brute_longcycle` is the exhaustive reference used by the tests.
"""

import logging
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, List, Mapping, Optional, Set, Tuple

import networkx as nx

from .config import DEFAULT_BRUTE_LONGCYCLE_VERTEX_CAP
from .errors import InvalidInstanceError, OracleInfeasibleError

logger = logging.getLogger(__name__)

KCycle = Tuple[Hashable, ...]


@dataclass
class KPartiteGraph:
    """Directed graph whose vertices carry a part label in 0..k-1."""
    k: int
    graph: nx.DiGraph

    @classmethod
    def from_edges(cls, k: int, parts: Mapping[Hashable, int],
                   edges: Iterable[Tuple[Hashable, Hashable]]) -> 'KPartiteGraph':
        g = nx.DiGraph()
        for v, p in parts.items():
            g.add_node(v, part=p)
        for u, v in edges:
            if u not in parts or v not in parts:
                raise InvalidInstanceError(f"edge {u!r} -> {v!r} uses an unlabelled vertex")
            g.add_edge(u, v)
        return cls(k, g)

    def part(self, v: Hashable) -> int:
        return self.graph.nodes[v]['part']

    def validate(self) -> None:
        if self.k < 2:
            raise InvalidInstanceError(f"k must be at least 2, got {self.k}")
        for v in self.graph.nodes:
            p = self.graph.nodes[v].get('part')
            if p is None or not 0 <= p < self.k:
                raise InvalidInstanceError(f"vertex {v!r} has no part label in 0..{self.k - 1}")
        for u, v in self.graph.edges:
            if self.part(v) != (self.part(u) + 1) % self.k:
                raise InvalidInstanceError(
                    f"edge {u!r} -> {v!r} goes from part {self.part(u)} to part {self.part(v)}")
            if u not in self._reach_exactly(v, self.k - 1):
                raise InvalidInstanceError(f"edge {u!r} -> {v!r} lies on no {self.k}-cycle")

    def _reach_exactly(self, start: Hashable, steps: int) -> Set[Hashable]:
        frontier = {start}
        for _ in range(steps):
            frontier = {w for v in frontier for w in self.graph.successors(v)}
        return frontier


def k_cycles(g: KPartiteGraph) -> List[KCycle]:
    '''All k-cycles, each listed from its part-0 vertex.'''
    out: List[KCycle] = []
    for start in g.graph.nodes:
        if g.part(start) != 0:
            continue
        path = [start]

        def extend(v: Hashable) -> Iterator[KCycle]:
            if len(path) == g.k:
                if g.graph.has_edge(v, start):
                    yield tuple(path)
                return
            for w in g.graph.successors(v):
                path.append(w)
                yield from extend(w)
                path.pop()

        out.extend(extend(start))
    return out


def kcycle_intersection_graph(g: KPartiteGraph, k: Optional[int] = None) -> nx.Graph:
    '''Undirected graph on the k-cycles; two cycles are adjacent when they share a vertex.'''
    if k is not None and k != g.k:
        raise InvalidInstanceError(f"instance is {g.k}-partite, not {k}-partite")
    cycles = k_cycles(g)
    h = nx.Graph()
    h.add_nodes_from(cycles)
    members = {c: set(c) for c in cycles}
    for i, a in enumerate(cycles):
        for b in cycles[i + 1:]:
            if members[a] & members[b]:
                h.add_edge(a, b)
    return h


def _has_bounded_long_cycle(g: KPartiteGraph) -> bool:
    '''Elementary cycle of length n*k for some 2 <= n <= 2k-3.'''
    k = g.k
    if 2 * k - 3 < 2:
        return False
    for cycle in nx.simple_cycles(g.graph, length_bound=(2 * k - 3) * k):
        if len(cycle) >= 2 * k:
            return True
    return False


def _induced_paths(h: nx.Graph, length: int) -> Iterator[List[KCycle]]:
    '''Induced paths P1..P_length, except that P1 and P_length may be adjacent.'''
    path: List[KCycle] = []

    def ok(nxt: KCycle) -> bool:
        if nxt in path:
            return False
        last_slot = len(path) + 1 == length
        for i, earlier in enumerate(path[:-1]):
            if i == 0 and last_slot:
                continue
            if h.has_edge(earlier, nxt):
                return False
        return True

    def extend() -> Iterator[List[KCycle]]:
        if len(path) == length:
            yield list(path)
            return
        for nxt in h.neighbors(path[-1]):
            if ok(nxt):
                path.append(nxt)
                yield from extend()
                path.pop()

    for start in h.nodes:
        path.append(start)
        yield from extend()
        path.pop()


def _closes_long_chordless_cycle(h: nx.Graph, path: List[KCycle]) -> bool:
    first, last = path[0], path[-1]
    if h.has_edge(first, last):
        return True
    blocked: Set[KCycle] = set()
    for p in path[1:-1]:
        blocked.add(p)
        blocked.update(h.neighbors(p))
    blocked -= {first, last}
    rest = h.subgraph(v for v in h.nodes if v not in blocked)
    return nx.has_path(rest, first, last)


def has_long_chordless_cycle(h: nx.Graph, k: int) -> bool:
    for path in _induced_paths(h, 2 * k):
        if _closes_long_chordless_cycle(h, path):
            return True
    return False


def longcycle(g: KPartiteGraph, k: Optional[int] = None) -> bool:
    '''Whether g has an elementary directed cycle of length >= 2k.'''
    if k is not None and k != g.k:
        raise InvalidInstanceError(f"instance is {g.k}-partite, not {k}-partite")
    g.validate()
    if _has_bounded_long_cycle(g):
        logger.debug("LONGCYCLE: bounded-length cycle found")
        return True
    h = kcycle_intersection_graph(g)
    found = has_long_chordless_cycle(h, g.k)
    logger.debug(f"LONGCYCLE: {h.number_of_nodes()} k-cycles, chordless cycle found={found}")
    return found


def brute_longcycle(g: KPartiteGraph, k: Optional[int] = None,
                    cap: int = DEFAULT_BRUTE_LONGCYCLE_VERTEX_CAP) -> bool:
    '''Exhaustive elementary-cycle search.'''
    k = g.k if k is None else k
    n = g.graph.number_of_nodes()
    if n > cap:
        raise OracleInfeasibleError(f"oracle infeasible: {n} vertices exceed cap {cap}")
    return any(len(c) >= 2 * k for c in nx.simple_cycles(g.graph))
