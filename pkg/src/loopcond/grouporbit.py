"""Finite permutation groups, orbits and pseudo-loops.

A finite stand-in for a core clone is a :class:`CoreAlgebra`: a finite
algebra whose unary operations are exactly permutations from a group G,
with every generator of G and its inverse present. Pseudo-loop conditions
``u1∘f(...) = ... = um∘f(...)`` are then decided like plain loop
conditions, except that the m blocks of a closure vector only need to lie
in one orbit of G acting coordinatewise.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .core import FiniteAlgebra, LoopCondition, Operation, Relation, all_assignments, eval_term
from .errors import LoopCondError
from .indicator import DEFAULT_CELL_BUDGET, DEFAULT_MAX_APPLICATIONS, DEFAULT_MAX_SIZE, build_indicator, generate_closure
from .terms import Term

Perm = Tuple[int, ...]


def compose(p: Perm, q: Perm) -> Perm:
    """p after q."""
    return tuple(p[i] for i in q)


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


@dataclass(frozen=True)
class PermGroup:
    degree: int
    generators: Tuple[Perm, ...] = ()

    def __post_init__(self):
        gens = tuple(tuple(int(x) for x in g) for g in self.generators)
        for g in gens:
            if sorted(g) != list(range(self.degree)):
                raise LoopCondError(f"generator {g} is not a permutation of 0..{self.degree - 1}")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def trivial(cls, degree: int) -> "PermGroup":
        return cls(degree, ())

    @classmethod
    def from_cycles(cls, degree: int, *cycles: Sequence[Sequence[int]]) -> "PermGroup":
        """Each argument is one generator, given as a list of disjoint cycles."""
        gens = []
        for gen in cycles:
            p = list(range(degree))
            for cyc in gen:
                for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                    p[a] = b
            gens.append(tuple(p))
        return cls(degree, tuple(gens))

    @property
    def identity(self) -> Perm:
        return tuple(range(self.degree))

    def elements(self) -> Dict[Perm, Tuple[int, ...]]:
        """Every group element with a shortest word in the generators.

        A word (i, j, ...) means: apply generator i first, then j, ...
        """
        words = {self.identity: ()}
        queue = deque([self.identity])
        while queue:
            p = queue.popleft()
            for k, g in enumerate(self.generators):
                q = compose(g, p)
                if q not in words:
                    words[q] = words[p] + (k,)
                    queue.append(q)
        return words

    def order(self) -> int:
        return len(self.elements())


def orbit_of(G: PermGroup, p: Sequence[int]) -> Set[Tuple[int, ...]]:
    """Orbit of a tuple under the coordinatewise action, by BFS over generators."""
    p = tuple(int(e) for e in p)
    if any(e < 0 or e >= G.degree for e in p):
        raise LoopCondError(f"tuple {p} leaves 0..{G.degree - 1}")
    seen = {p}
    queue = deque([p])
    while queue:
        q = queue.popleft()
        for g in G.generators:
            r = tuple(g[e] for e in q)
            if r not in seen:
                seen.add(r)
                queue.append(r)
    return seen


def point_orbit(G: PermGroup, a: int) -> Set[int]:
    return {q[0] for q in orbit_of(G, (a,))}


def orbit_partition(G: PermGroup) -> List[int]:
    """label[a] = smallest element of the orbit of a."""
    label = [-1] * G.degree
    for a in range(G.degree):
        if label[a] < 0:
            for b in point_orbit(G, a):
                label[b] = a
    return label


def same_orbit(G: PermGroup, a: int, b: int) -> bool:
    return b in point_orbit(G, a)


def find_pseudo_loop(R: Relation, G: PermGroup) -> Optional[Tuple[int, ...]]:
    if G.degree != R.domain:
        raise LoopCondError(f"group degree {G.degree} differs from relation domain {R.domain}")
    label = orbit_partition(G)
    for t in R.tuples:
        if all(label[e] == label[t[0]] for e in t):
            return t
    return None


def orbit_neighbors(R: Relation, O: Iterable[int]) -> Set[int]:
    """All d with R(q, d) for some q in O."""
    if R.arity != 2:
        raise LoopCondError("orbit neighbours are defined for binary relations")
    O = set(O)
    return {d for q, d in R.tuples if q in O}


@dataclass(frozen=True, eq=False)
class CoreAlgebra:
    algebra: FiniteAlgebra
    group: PermGroup

    def __post_init__(self):
        A, G = self.algebra, self.group
        if G.degree != A.size:
            raise LoopCondError(f"group degree {G.degree} differs from algebra size {A.size}")
        unary = {tuple(int(v) for v in op.table) for op in A.operations if op.arity == 1}
        for g in G.generators:
            if g not in unary or inverse(g) not in unary:
                raise LoopCondError(f"generator {g} or its inverse is missing from the unary operations")
        members = G.elements()
        for u in unary:
            if u not in members:
                raise LoopCondError(f"unary operation {u} is not an element of the group")

    @classmethod
    def with_group(cls, A: FiniteAlgebra, G: PermGroup) -> "CoreAlgebra":
        """Add each generator and its inverse as unary operations where missing."""
        have = {tuple(int(v) for v in op.table) for op in A.operations if op.arity == 1}
        extra = []
        for k, g in enumerate(G.generators):
            for name, p in ((f"g{k}", g), (f"g{k}inv", inverse(g))):
                if p not in have:
                    have.add(p)
                    extra.append(Operation(name, 1, np.array(p, dtype=np.int64)))
        return cls(A.with_operations(extra), G)


@dataclass
class PseudoWitness:
    term: Term
    unary: List[Perm]  # one group element per row
    words: List[Tuple[int, ...]]


def _orbit_mask(m: int, elements: np.ndarray):
    def check(rows: np.ndarray) -> np.ndarray:
        blocks = rows.reshape(rows.shape[0], m, -1)
        ok = np.ones(rows.shape[0], dtype=bool)
        for i in range(1, m):
            hit = np.zeros(rows.shape[0], dtype=bool)
            for g in elements:
                hit |= (g[blocks[:, i, :]] == blocks[:, 0, :]).all(axis=1)
            ok &= hit
        return ok
    return check


def pseudo_satisfies(
    C: CoreAlgebra,
    P: LoopCondition,
    budget: int = DEFAULT_CELL_BUDGET,
    max_size: int = DEFAULT_MAX_SIZE,
    max_applications: int = DEFAULT_MAX_APPLICATIONS,
    stats: dict = None,
) -> Optional[PseudoWitness]:
    """Witness f and u1..um (from the group) for P in C, or None."""
    A = C.algebra
    words = C.group.elements()
    perms = list(words)
    elements = np.array(perms, dtype=np.uint8).reshape(len(perms), A.size)
    inst = build_indicator(A, P.plain(), budget)
    clo = generate_closure(A, inst, max_size, max_applications, stop=_orbit_mask(P.rows, elements))
    if stats is not None:
        stats.update(clo.stats())
        stats["group_order"] = len(perms)
    if clo.found is None:
        return None
    blocks = clo.vectors[clo.found].reshape(P.rows, -1)
    unary = []
    for i in range(P.rows):
        for g, arr in zip(perms, elements):
            if np.array_equal(arr[blocks[i]], blocks[0]):
                unary.append(g)
                break
    w = PseudoWitness(clo.term(clo.found), unary, [words[g] for g in unary])
    if not verify_pseudo_witness(A, P, w.term, w.unary):
        raise AssertionError(f"pseudo witness {w.term} fails verification")
    return w


def verify_pseudo_witness(A: FiniteAlgebra, P: LoopCondition, f: Term, unary: Sequence[Perm]) -> bool:
    """u_i(f(row_i)) agree across rows on every assignment."""
    if len(unary) != P.rows:
        raise LoopCondError(f"need {P.rows} unary maps, got {len(unary)}")
    env = all_assignments(A.size, P.variables)
    shape = env[P.variables[0]].shape
    values = []
    for row, u in zip(P.matrix, unary):
        val = np.broadcast_to(eval_term(A, f, {f"x{j + 1}": env[v] for j, v in enumerate(row)}), shape)
        values.append(np.asarray(u)[val])
    return all(np.array_equal(values[0], v) for v in values[1:])
