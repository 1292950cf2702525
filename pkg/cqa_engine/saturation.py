#!/usr/bin/env python3
"""
Saturation

Internal functional dependencies, the query-level saturation loop that materialises them as
fresh mode-c atoms, and the database-level purification step that makes the new relations
consistent while preserving the certain answer.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Set, Tuple

from .attack_analysis import attacked_variables
from .core.database import Database
from .core.evaluation import iter_embeddings
from .core.schema import Atom, Fact, Mode, Query, RelationSchema
from .core.terms import Constant, Term, Variable
from .errors import PreconditionError, SaturationError
from .fd_engine import FunctionalDependency, SequentialProof, entails, fds_of, sequential_proof

logger = logging.getLogger(__name__)

# Key column used when an internal FD has an empty left-hand side.
EMPTY_KEY = Constant.number(0)


@dataclass(frozen=True)
class InternalFD:
    lhs: FrozenSet[str]
    target: str
    host: str
    proof: SequentialProof

    @property
    def fd(self) -> FunctionalDependency:
        return FunctionalDependency(self.lhs, frozenset([self.target]))

    def __str__(self) -> str:
        return f"{self.fd} host={self.host} proof={self.proof}"


@dataclass(frozen=True)
class SaturationStep:
    """One fresh mode-c atom N(Z | w) together with the internal FD it materialises."""
    atom: Atom
    lhs: FrozenSet[str]
    target: str
    host: str
    proof: SequentialProof


@dataclass
class SaturationResult:
    query: Query
    added: List[SaturationStep] = field(default_factory=list)

    @property
    def changed(self) -> bool:
        return bool(self.added)


def _lhs_candidates(atom: Atom) -> List[FrozenSet[str]]:
    names = sorted(atom.vars)
    out = []
    for size in range(len(names) + 1):
        for combo in combinations(names, size):
            out.append(frozenset(combo))
    return out


def internal_fds(q: Query) -> List[InternalFD]:
    '''Every Z -> w with Z inside one atom and a proof whose atoms attack nothing in Z + w.'''
    attacked = attacked_variables(q)
    seen: Set[Tuple[FrozenSet[str], str]] = set()
    out: List[InternalFD] = []
    for host in q.atoms:
        for lhs in _lhs_candidates(host):
            for target in sorted(q.vars - lhs):
                if (lhs, target) in seen:
                    continue
                guarded = lhs | {target}
                allowed = [a for a in q.atoms if not (attacked[a.name] & guarded)]
                proof = sequential_proof(q, lhs, target, allowed)
                if proof is None:
                    continue
                seen.add((lhs, target))
                out.append(InternalFD(lhs, target, host.name, proof))
    return out


def is_saturated(q: Query) -> bool:
    sigma = fds_of(q.catoms)
    return all(entails(sigma, ifd.fd) for ifd in internal_fds(q))


def fd_atom(name: str, lhs: Iterable[str], target: str) -> Atom:
    '''Mode-c atom N(sorted Z | w); an empty Z becomes the constant key 0.'''
    key: List[Term] = [Variable(x) for x in sorted(lhs)] or [EMPTY_KEY]
    return Atom.make(name, key, [Variable(target)], mode=Mode.C)


def saturate(q: Query) -> SaturationResult:
    '''Add N@c(Z | w) for internal FDs not yet entailed by the mode-c atoms, until saturated.'''
    result = SaturationResult(q)
    counter = 0
    current = q
    while True:
        pending = internal_fds(current)
        sigma = fds_of(current.catoms)
        added_this_pass = 0
        for ifd in pending:
            if entails(sigma, ifd.fd):
                continue
            counter += 1
            name = current.fresh_name(f"N_sat_{counter}")
            atom = fd_atom(name, ifd.lhs, ifd.target)
            result.added.append(SaturationStep(atom, ifd.lhs, ifd.target, ifd.host, ifd.proof))
            sigma.append(FunctionalDependency(atom.key_vars, atom.vars))
            current = current.with_atoms(atom)
            added_this_pass += 1
            logger.debug(f"Saturation adds {atom} for {ifd}")
        if not added_this_pass:
            break
    result.query = current
    if result.added:
        logger.info(f"Saturated {q.name}: added {len(result.added)} mode-c atom(s)")
    return result


def _violating_blocks(q: Query, db: Database, lhs: Tuple[str, ...], target: str,
                      host: Atom) -> Set[Tuple[str, Tuple[Constant, ...]]]:
    groups: Dict[Tuple[Constant, ...], Set[Constant]] = {}
    hosts: Dict[Tuple[Constant, ...], Set[Fact]] = {}
    for beta in iter_embeddings(q, db):
        z = tuple(beta[x] for x in lhs)
        groups.setdefault(z, set()).add(beta[target])
        hosts.setdefault(z, set()).add(host.ground(beta))
    doomed = set()
    for z, values in groups.items():
        if len(values) > 1:
            doomed |= {f.block_id for f in hosts[z]}
    return doomed


def purify(db: Database, q: Query, fd: Tuple[Iterable[str], str], host: Atom,
           fresh: RelationSchema, fixpoint: bool = False) -> Database:
    '''Drop host blocks of embeddings that disagree on w for equal Z, then add N(Z | w).

    One pass suffices; `fixpoint=True` repeats the removal until nothing changes.
    '''
    lhs = tuple(sorted(fd[0]))
    target = fd[1]
    if host not in q:
        raise PreconditionError(f"host atom {host.name} is not in the query")
    if not set(lhs) <= host.vars:
        raise PreconditionError(f"left-hand side {{{','.join(lhs)}}} is not inside {host.name}")
    if target not in q.vars:
        raise PreconditionError(f"variable {target} does not occur in the query")
    if fresh.name in q.relation_names or fresh.name in db.schemas:
        raise SaturationError(f"relation name {fresh.name} is already in use")
    if fresh.mode is not Mode.C or fresh.key_len != max(1, len(lhs)) or \
            fresh.arity != fresh.key_len + 1:
        raise SaturationError(f"relation {fresh.signature} cannot hold the FD")

    purified = db
    while True:
        doomed = _violating_blocks(q, purified, lhs, target, host)
        if doomed:
            logger.debug(f"Purification removes {len(doomed)} {host.name}-block(s)")
            purified = purified.without_blocks(doomed)
        if not doomed or not fixpoint:
            break

    n_facts = set()
    for beta in iter_embeddings(q, purified):
        key = tuple(beta[x] for x in lhs) or (EMPTY_KEY,)
        n_facts.add(Fact(fresh, key, (beta[target],)))
    return purified.union(n_facts)


def purify_all(db: Database, q: Query, result: SaturationResult,
               fixpoint: bool = False) -> Database:
    '''Apply purification for every saturation step in order.'''
    current_q = q
    current_db = db
    for step in result.added:
        current_db = purify(current_db, current_q, (step.lhs, step.target),
                            current_q.atom(step.host), step.atom.relation, fixpoint)
        current_q = current_q.with_atoms(step.atom)
    return current_db
