#!/usr/bin/env python3
"""
DOT Export

Graphviz source for the schema-level graphs (attack graph, M-graph) and the data-level graphs
(hook graph, C-hook graph, block quotient). Only the DOT text is produced; no layout binary
is needed.
"""

import logging
from typing import Dict, Iterable, List

from graphviz import Digraph

from .attack_analysis import AttackGraph
from .core.schema import BlockId, Fact, Query, block_label
from .mgraph import BlockQuotientGraph, HookGraph, MGraph

logger = logging.getLogger(__name__)

GRAPH_KINDS = ('attack', 'mgraph', 'hook', 'chook', 'quotient')


def _digraph(name: str) -> Digraph:
    graph = Digraph(name)
    graph.graph_attr['rankdir'] = 'LR'
    graph.node_attr['shape'] = 'box'
    return graph


def _atom_nodes(graph: Digraph, q: Query) -> None:
    for atom in q.atoms:
        graph.node(atom.name, str(atom))


def attack_graph_dot(g: AttackGraph) -> str:
    '''Weak attacks are dashed, strong attacks solid; edge labels carry the witness.'''
    graph = _digraph('attack')
    _atom_nodes(graph, g.query)
    for attack in g.edges():
        witness = ' '.join(f"{atom}-{var}->" for atom, var in attack.witness)
        graph.edge(attack.source, attack.target, label=witness,
                   style='dashed' if attack.is_weak else 'solid')
    return graph.source


def mgraph_dot(mg: MGraph) -> str:
    graph = _digraph('mgraph')
    _atom_nodes(graph, mg.query)
    for source, target in sorted(mg.edges):
        graph.edge(source, target)
    return graph.source


def _fact_ids(facts: Iterable[Fact]) -> Dict[Fact, str]:
    return {f: f"f{i}" for i, f in enumerate(facts)}


def hook_graph_dot(hg: HookGraph) -> str:
    '''Fact vertices clustered by block; works for the full and the C-restricted hook graph.'''
    graph = _digraph('chook' if hg.cycle is not None else 'hook')
    facts = hg.facts()
    ids = _fact_ids(facts)
    by_block: Dict[BlockId, List[Fact]] = {}
    for f in facts:
        by_block.setdefault(f.block_id, []).append(f)
    for i, (block, members) in enumerate(by_block.items()):
        with graph.subgraph(name=f"cluster_{i}") as sub:
            sub.attr(label=block_label(block), style='dashed')
            for f in members:
                sub.node(ids[f], str(f))
    for a, b in hg.edges():
        graph.edge(ids[a], ids[b])
    return graph.source


def quotient_dot(qg: BlockQuotientGraph) -> str:
    '''Block vertices labelled by relation and key values.'''
    graph = _digraph('quotient')
    ids = {b: f"b{i}" for i, b in enumerate(qg.blocks())}
    for block, node in ids.items():
        graph.node(node, block_label(block))
    for a, b in qg.edges():
        graph.edge(ids[a], ids[b])
    logger.debug(f"Quotient DOT: {len(ids)} block(s), {len(qg.edges())} edge(s)")
    return graph.source
