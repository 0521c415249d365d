"""Homomorphisms between single-relation structures.

The search is a plain backtracking CSP: source elements ordered by
descending degree, target values tried in ascending order, forward checking
on every source tuple that has exactly one unassigned element left.
"""
from __future__ import annotations

import itertools
from typing import Dict, List, Optional, Tuple

from .core import LoopCondition, Relation, relation_of
from .errors import ArityError, LoopCondError

HomMap = Tuple[int, ...]


def make_clique(k: int, m: int) -> Relation:
    """All non-constant m-tuples over {0..k-1}."""
    if k < 2 or m < 2:
        raise LoopCondError("cliques need k, m >= 2")
    tuples = [t for t in itertools.product(range(k), repeat=m) if len(set(t)) > 1]
    return Relation(k, m, tuples)


def find_loop(R: Relation) -> Optional[int]:
    for t in R.tuples:
        if all(e == t[0] for e in t):
            return t[0]
    return None


def is_hom(src: Relation, dst: Relation, h) -> bool:
    if len(h) != src.domain:
        return False
    dset = dst.tuple_set
    return all(tuple(h[e] for e in t) in dset for t in src.tuples)


def _search_order(src: Relation) -> List[int]:
    degree = [0] * src.domain
    for t in src.tuples:
        for e in set(t):
            degree[e] += 1
    return sorted(range(src.domain), key=lambda e: (-degree[e], e))


def find_hom(src: Relation, dst: Relation, injective: bool = False, stats: dict = None) -> Optional[HomMap]:
    """First homomorphism in the fixed search order, or None if there is none.

    The returned map lists ``h[e]`` for every source element ``e``.
    """
    if src.arity != dst.arity:
        raise ArityError(f"arity mismatch: {src.arity} vs {dst.arity}")
    if injective and src.domain > dst.domain:
        return None
    order = _search_order(src)
    dset = dst.tuple_set
    touching: List[List[Tuple[int, ...]]] = [[] for _ in range(src.domain)]
    for t in src.tuples:
        for e in set(t):
            touching[e].append(t)

    domains: List[set] = [set(range(dst.domain)) for _ in range(src.domain)]
    assign: List[Optional[int]] = [None] * src.domain
    nodes = 0

    def prune(e: int, trail: list) -> bool:
        """Forward-check tuples around the freshly assigned element e."""
        if injective:
            v = assign[e]
            for f in range(src.domain):
                if assign[f] is None and v in domains[f]:
                    domains[f].discard(v)
                    trail.append((f, v))
                    if not domains[f]:
                        return False
        for t in touching[e]:
            free = {f for f in t if assign[f] is None}
            if not free:
                if tuple(assign[f] for f in t) not in dset:
                    return False
            elif len(free) == 1:
                (f,) = free
                for v in list(domains[f]):
                    if tuple(v if g == f else assign[g] for g in t) not in dset:
                        domains[f].discard(v)
                        trail.append((f, v))
                if not domains[f]:
                    return False
        return True

    def solve(pos: int) -> bool:
        nonlocal nodes
        if pos == len(order):
            return True
        e = order[pos]
        for v in sorted(domains[e]):
            nodes += 1
            assign[e] = v
            trail: list = []
            if prune(e, trail) and solve(pos + 1):
                return True
            for f, w in trail:
                domains[f].add(w)
            assign[e] = None
        return False

    found = solve(0)
    if stats is not None:
        stats["nodes"] = stats.get("nodes", 0) + nodes
    return tuple(assign) if found else None


def brute_force_hom(src: Relation, dst: Relation, injective: bool = False) -> Optional[HomMap]:
    """Exhaustive enumeration of all maps; the oracle for find_hom."""
    for h in itertools.product(range(dst.domain), repeat=src.domain):
        if injective and len(set(h)) < len(h):
            continue
        if is_hom(src, dst, h):
            return h
    return None


def implies_by_hom(L: LoopCondition, L2: LoopCondition, stats: dict = None) -> Optional[Dict[str, str]]:
    """A variable map sending every column of L to a column of L2, if one exists.

    Such a map certifies that every algebra satisfying L satisfies L2.
    """
    if L.rows != L2.rows:
        raise ArityError(f"width mismatch: {L.rows} vs {L2.rows}")
    R, idx = relation_of(L)
    R2, idx2 = relation_of(L2)
    h = find_hom(R, R2, False, stats)
    if h is None:
        return None
    names2 = list(idx2)
    return {v: names2[h[i]] for v, i in idx.items()}


def column_map(L: LoopCondition, L2: LoopCondition, varmap: Dict[str, str]) -> List[int]:
    """For each column of L, the index of the L2 column it is sent to."""
    cols2 = {col: j for j, col in reversed(list(enumerate(L2.columns)))}
    out = []
    for col in L.columns:
        image = tuple(varmap[v] for v in col)
        if image not in cols2:
            raise LoopCondError(f"column {col} is not mapped onto a column of the target")
        out.append(cols2[image])
    return out
