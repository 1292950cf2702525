#!/usr/bin/env python3
"""
Attack Graph Analysis

Builds the attack graph of a self-join-free Boolean conjunctive query, classifies each
attack as weak or strong, and derives the complexity class of CQA(q):

- FO when the attack graph is acyclic
- CONP_COMPLETE when it contains a strong cycle (equivalently a strong 2-cycle)
- LSPACE_NOT_FO otherwise
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Tuple

import networkx as nx

from .core.schema import Atom, Query
from .core.terms import Variable
from .errors import PreconditionError
from .fd_engine import FunctionalDependency, entails, fd_closure, fds_of

logger = logging.getLogger(__name__)


class AttackStrength(Enum):
    """Weak attacks satisfy FD(q) |= key(F) -> key(G)."""
    WEAK = "weak"
    STRONG = "strong"


class ComplexityClass(Enum):
    """Complexity of CQA(q); the value doubles as the CLI exit code."""
    FO = "FO"
    LSPACE_NOT_FO = "LSPACE_NOT_FO"
    CONP_COMPLETE = "CONP_COMPLETE"

    @property
    def exit_code(self) -> int:
        return {"FO": 0, "LSPACE_NOT_FO": 1, "CONP_COMPLETE": 2}[self.value]


# One witness step: leave `atom` through `variable`.
WitnessStep = Tuple[str, str]


@dataclass(frozen=True)
class Attack:
    source: str
    target: str
    witness: Tuple[WitnessStep, ...]
    strength: AttackStrength

    @property
    def is_weak(self) -> bool:
        return self.strength is AttackStrength.WEAK

    def describe(self) -> str:
        chain = ''.join(f"{atom} -{var}-> " for atom, var in self.witness)
        return f"{self.source} => {self.target} [{self.strength.value}] via {chain}{self.target}"


@dataclass
class AttackGraph:
    query: Query
    keycl: Dict[str, FrozenSet[str]]
    attacks: Dict[Tuple[str, str], Attack] = field(default_factory=dict)

    @property
    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.query.relation_names)
        for (src, tgt), attack in self.attacks.items():
            g.add_edge(src, tgt, strength=attack.strength.value)
        return g

    def has_edge(self, source: str, target: str) -> bool:
        return (source, target) in self.attacks

    def successors(self, name: str) -> List[str]:
        return sorted(t for (s, t) in self.attacks if s == name)

    def attacked(self, name: str) -> bool:
        return any(t == name for (_, t) in self.attacks)

    def edges(self) -> List[Attack]:
        return [self.attacks[k] for k in sorted(self.attacks)]

    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.graph)


def keycl(atom: Atom, q: Query) -> FrozenSet[str]:
    '''K+(F, q): closure of key(F) under FD(q minus F) together with FD(catoms(q)).'''
    if atom not in q:
        raise PreconditionError(f"atom {atom.name} is not in the query")
    sigma = fds_of(a for a in q.atoms if a != atom) + fds_of(q.catoms)
    return fd_closure(atom.key_vars, sigma)


def _witness_search(source: Atom, q: Query, closure: FrozenSet[str]
                    ) -> Dict[str, Tuple[WitnessStep, ...]]:
    '''Shortest witness from source to every atom it attacks (BFS in name order).'''
    parents: Dict[str, Optional[WitnessStep]] = {source.name: None}
    queue = deque([source])
    while queue:
        current = queue.popleft()
        for other in q.atoms:
            if other.name in parents:
                continue
            shared = sorted((current.vars & other.vars) - closure)
            if shared:
                parents[other.name] = (current.name, shared[0])
                queue.append(other)
    out: Dict[str, Tuple[WitnessStep, ...]] = {}
    for name in parents:
        if name == source.name:
            continue
        steps: List[WitnessStep] = []
        cursor: Optional[str] = name
        while cursor is not None and parents[cursor] is not None:
            step = parents[cursor]
            steps.append(step)  # type: ignore[arg-type]
            cursor = step[0]  # type: ignore[index]
        out[name] = tuple(reversed(steps))
    return out


@lru_cache(maxsize=4096)
def attack_graph(q: Query) -> AttackGraph:
    '''Complete attack graph with one shortest witness per edge.'''
    sigma_q = fds_of(q.atoms)
    closures = {a.name: keycl(a, q) for a in q.atoms}
    graph = AttackGraph(q, closures)
    for atom in q.atoms:
        for target, witness in _witness_search(atom, q, closures[atom.name]).items():
            weak = entails(sigma_q, FunctionalDependency(atom.key_vars, q.atom(target).key_vars))
            strength = AttackStrength.WEAK if weak else AttackStrength.STRONG
            graph.attacks[(atom.name, target)] = Attack(atom.name, target, witness, strength)
    return graph


def attacks_variable(atom: Atom, variable: str, q: Query) -> bool:
    '''Whether F attacks the fresh unary atom N(x) in q extended with N(x).'''
    if atom not in q:
        raise PreconditionError(f"atom {atom.name} is not in the query")
    marker = Atom.make(q.fresh_name(f"N_mark_{variable}"), [Variable(variable)])
    extended = q.with_atoms(marker)
    reached = _witness_search(atom, extended, keycl(atom, extended))
    return marker.name in reached


@lru_cache(maxsize=4096)
def attacked_variables(q: Query) -> Dict[str, FrozenSet[str]]:
    '''For every atom, the set of variables it attacks.'''
    out: Dict[str, FrozenSet[str]] = {}
    for atom in q.atoms:
        out[atom.name] = frozenset(x for x in q.vars if attacks_variable(atom, x, q))
    return out


def classify_complexity(q: Query) -> ComplexityClass:
    g = attack_graph(q)
    if g.is_acyclic():
        return ComplexityClass.FO
    for a, b in combinations(q.relation_names, 2):
        if g.has_edge(a, b) and g.has_edge(b, a):
            if not (g.attacks[(a, b)].is_weak and g.attacks[(b, a)].is_weak):
                return ComplexityClass.CONP_COMPLETE
    return ComplexityClass.LSPACE_NOT_FO


def has_strong_cycle(g: AttackGraph) -> bool:
    '''Exact test: a strong edge F => G lies on a cycle iff G reaches F.'''
    graph = g.graph
    for attack in g.attacks.values():
        if not attack.is_weak and nx.has_path(graph, attack.target, attack.source):
            return True
    return False


def has_key_join_property(q: Query) -> bool:
    for f, g in combinations(q.atoms, 2):
        shared = f.vars & g.vars
        if not shared or shared == f.key_vars or shared == g.key_vars:
            continue
        if shared >= (f.key_vars | g.key_vars):
            continue
        return False
    return True


def initial_strong_components(g: AttackGraph) -> List[FrozenSet[str]]:
    '''Strong components without an incoming attack from outside, sorted by least member.'''
    graph = g.graph
    condensed = nx.condensation(graph)
    out = []
    for node in condensed.nodes:
        if condensed.in_degree(node) == 0:
            out.append(frozenset(condensed.nodes[node]['members']))
    return sorted(out, key=lambda comp: sorted(comp))


def unattacked_atoms(q: Query) -> List[Atom]:
    g = attack_graph(q)
    return [a for a in q.atoms if not g.attacked(a.name)]
