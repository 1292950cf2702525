#!/usr/bin/env python3
'''Functional dependencies over query variables: closure, entailment and sequential proofs.'''

from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .core.schema import Atom, Query


@dataclass(frozen=True)
class FunctionalDependency:
    lhs: FrozenSet[str]
    rhs: FrozenSet[str]

    @classmethod
    def of(cls, lhs: Iterable[str], rhs: Iterable[str]) -> 'FunctionalDependency':
        return cls(frozenset(lhs), frozenset(rhs))

    def __str__(self) -> str:
        return f"{{{','.join(sorted(self.lhs))}}} -> {{{','.join(sorted(self.rhs))}}}"


def atom_fd(atom: Atom) -> FunctionalDependency:
    '''key(F) -> vars(F).'''
    return FunctionalDependency(atom.key_vars, atom.vars)


def fds_of(atoms: Iterable[Atom]) -> List[FunctionalDependency]:
    return [atom_fd(a) for a in atoms]


def fd_closure(attrs: Iterable[str], sigma: Iterable[FunctionalDependency]) -> FrozenSet[str]:
    '''Smallest superset of attrs closed under sigma.'''
    closure: Set[str] = set(attrs)
    pending = list(sigma)
    changed = True
    while changed:
        changed = False
        rest = []
        for fd in pending:
            if fd.lhs <= closure:
                if not fd.rhs <= closure:
                    closure |= fd.rhs
                    changed = True
            else:
                rest.append(fd)
        pending = rest
    return frozenset(closure)


def entails(sigma: Iterable[FunctionalDependency], fd: FunctionalDependency) -> bool:
    return fd.rhs <= fd_closure(fd.lhs, sigma)


@dataclass(frozen=True)
class SequentialProof:
    """Atoms F_1..F_n such that each key is covered by lhs and the earlier atoms' variables."""
    lhs: FrozenSet[str]
    target: str
    atoms: Tuple[Atom, ...] = ()

    def is_valid(self) -> bool:
        derived = set(self.lhs)
        if not self.atoms:
            return self.target in derived
        for atom in self.atoms:
            if not atom.key_vars <= derived:
                return False
            derived |= atom.vars
        return any(self.target in a.vars for a in self.atoms)

    def __str__(self) -> str:
        return '<' + ', '.join(a.name for a in self.atoms) + '>'


def _covers(atoms: Sequence[Atom], lhs: FrozenSet[str], target: str) -> bool:
    return SequentialProof(lhs, target, tuple(atoms)).is_valid()


def sequential_proof(q: Query, lhs: Iterable[str], target: str,
                     allowed: Optional[Iterable[Atom]] = None) -> Optional[SequentialProof]:
    '''A sequential proof for lhs -> target using only `allowed` atoms, or None.

    The greedy closure adds every allowed atom whose key is covered; since proofs compose this
    decides existence. The result is then pruned to an inclusion-minimal proof.
    '''
    z = frozenset(lhs)
    if target in z:
        return SequentialProof(z, target, ())
    pool = [a for a in (q.atoms if allowed is None else allowed)]
    pool.sort(key=lambda a: a.name)
    derived: Set[str] = set(z)
    used: List[Atom] = []
    progress = True
    while progress and target not in derived:
        progress = False
        for atom in pool:
            if atom in used or not atom.key_vars <= derived:
                continue
            used.append(atom)
            derived |= atom.vars
            progress = True
            if target in derived:
                break
    if target not in derived:
        return None
    for atom in reversed(list(used)):
        trial = [a for a in used if a is not atom]
        if trial and _covers(trial, z, target):
            used = trial
    return SequentialProof(z, target, tuple(used))
