"""The free algebra on one (m+1)-ary weak near-unanimity symbol.

The only identities are ``t(x,y,...,y) = t(y,x,y,...,y) = ... = t(y,...,y,x)``
(no idempotency). They only move the odd argument around inside one
application, so a term is normalised by canonicalising its arguments and,
whenever all but one of them agree, rotating the odd one to the front.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence

from .core import LoopCondition
from .errors import ArityError, BudgetExceeded, LoopCondError
from .terms import App, Term, Var, depth, format_term, positional, substitute, subterms


def wnu_arity(u: Term) -> Optional[int]:
    """m for the applications in u (each has m+1 arguments), None for a variable."""
    ks = {len(s.args) for s in subterms(u) if isinstance(s, App)}
    if len(ks) > 1:
        raise ArityError(f"applications of mixed arity {sorted(ks)}")
    if ks:
        k = ks.pop()
        if k < 3:
            raise ArityError("a weak near-unanimity symbol needs arity m+1 >= 3")
        return k - 1
    return None


@lru_cache(maxsize=None)
def _canon(u: Term) -> Term:
    if isinstance(u, Var):
        return u
    args = tuple(_canon(a) for a in u.args)
    m = len(args) - 1
    (w, count), *_ = Counter(args).most_common(1)
    if count == m:
        odd = next(a for a in args if a != w)
        args = (odd,) + (w,) * m
    return App(u.symbol, args)


def wnu_canonical(u: Term) -> Term:
    wnu_arity(u)
    return _canon(u)


def wnu_equal(u: Term, v: Term) -> bool:
    mu, mv = wnu_arity(u), wnu_arity(v)
    if mu is not None and mv is not None and mu != mv:
        raise ArityError(f"terms over different arities: m={mu} and m={mv}")
    return _canon(u) == _canon(v)


def shared_coordinate(rows: Sequence[Sequence[Term]], symbol: str = "t") -> int:
    """A coordinate (0-based) on which all rows agree in the free algebra.

    The rows must give equal elements when t is applied to each of them.
    """
    rows = [tuple(r) for r in rows]
    if not rows:
        raise LoopCondError("no rows given")
    k = len(rows[0])
    if any(len(r) != k for r in rows):
        raise ArityError("rows of different lengths")
    heads = [_canon(App(symbol, r)) for r in rows]
    wnu_arity(App(symbol, rows[0]))
    if any(h != heads[0] for h in heads[1:]):
        raise LoopCondError("rows do not give equal elements of the free algebra")
    for i in range(k):
        first = _canon(rows[0][i])
        if all(_canon(r[i]) == first for r in rows[1:]):
            return i
    raise AssertionError("no shared coordinate; the normal form is broken")


def satisfies_loop(f: Term, L: LoopCondition) -> bool:
    """Do the m row substitutions of f (a term in x1..xn) give one element?"""
    xs = positional(L.arity)
    values = []
    for row in L.matrix:
        sub = {x.name: Var(v) for x, v in zip(xs, row)}
        values.append(_canon(substitute(f, sub)))
    return all(v == values[0] for v in values[1:])


@dataclass
class SearchReport:
    found: Optional[Term]
    checked_terms: int
    max_depth: int
    depth_reached: int

    def to_json(self) -> dict:
        return {
            "found": None if self.found is None else format_term(self.found),
            "checkedTerms": self.checked_terms,
            "maxDepth": self.max_depth,
            "depthReached": self.depth_reached,
        }


def enumerate_canonical(n: int, m: int, max_depth: int, symbol: str = "t", max_terms: int = 10 ** 7):
    """Yield canonical terms over x1..xn by depth, each exactly once.

    Depth d terms are applications whose arguments come from depth < d with
    at least one of depth d-1, in lexicographic order of the argument
    indices.
    """
    terms: List[Term] = list(positional(n))
    seen = set(terms)
    yield from terms
    level_start = 0
    for d in range(1, max_depth + 1):
        prev_end = len(terms)
        k = m + 1
        if prev_end ** k > max_terms:
            raise BudgetExceeded(f"argument tuples at depth {d}", prev_end ** k, max_terms)
        fresh = []
        for idx in itertools.product(range(prev_end), repeat=k):
            if max(idx) < level_start:
                continue
            t = _canon(App(symbol, tuple(terms[i] for i in idx)))
            if t not in seen:
                seen.add(t)
                fresh.append(t)
                yield t
        level_start = prev_end
        terms.extend(fresh)
        if not fresh:
            return


def search_satisfying_term(L: LoopCondition, max_depth: int, symbol: str = "t",
                           max_terms: int = 10 ** 7) -> SearchReport:
    """Look for a term over the (m+1)-ary WNU symbol satisfying L, depth by depth.

    For non-trivial L none exists at any depth; the report then records how
    many distinct free-algebra elements were ruled out.
    """
    if max_depth < 0:
        raise LoopCondError("max depth must be non-negative")
    checked = 0
    reached = 0
    for f in enumerate_canonical(L.arity, L.rows, max_depth, symbol, max_terms):
        checked += 1
        reached = depth(f)
        if satisfies_loop(f, L):
            return SearchReport(f, checked, max_depth, reached)
    return SearchReport(None, checked, max_depth, reached)
