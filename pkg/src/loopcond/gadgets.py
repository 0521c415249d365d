"""The clique formula phi_l and the pp-gadgets that trade K_{k+1} for K_k.

phi_l^R(z_1..z_l) asks R to hold on (z_{i_1},...,z_{i_m}) for every index
tuple that is not constant; on a loop-free R it says the z's are distinct
and induce K_l^m. The gadgets are relations on pairs, with (a, b) encoded
as a*d + b, defined by existential pp-formulas over R.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from . import _kernels
from .core import Relation
from .errors import BudgetExceeded, LoopCondError

DEFAULT_WORK_BUDGET = 10 ** 10


def phi_eval(R: Relation, z: Sequence[int]) -> bool:
    z = tuple(z)
    for idx in itertools.product(range(len(z)), repeat=R.arity):
        if len(set(idx)) > 1 and tuple(z[i] for i in idx) not in R:
            return False
    return True


def _phi(slots: Sequence[int], m: int) -> List[Tuple[int, ...]]:
    out = []
    for idx in itertools.product(range(len(slots)), repeat=m):
        if len(set(idx)) > 1:
            out.append(tuple(slots[i] for i in idx))
    return out


def _fixed(i: int) -> int:
    return -i - 1


class _Program:
    """Membership constraints over slots x_0..x_{nx-1} and fixed values."""

    def __init__(self, nx: int, m: int, constraints):
        self.nx, self.m = nx, m
        groups: List[List[Tuple[int, ...]]] = [[] for _ in range(nx + 1)]
        for c in sorted(set(constraints)):
            top = max((s for s in c if s >= 0), default=-1)
            groups[top + 1].append(c)
        rows = [c for g in groups for c in g]
        self.cons = np.array(rows, dtype=np.int64).reshape(len(rows), m)
        self.ptr = np.cumsum([0] + [len(g) for g in groups]).astype(np.int64)
        self.size = len(rows)

    def solve(self, R: Relation, fixed: Sequence[int]):
        xs = np.zeros(max(self.nx, 1), dtype=np.int64)
        ok = _kernels.search_xs(R.mask, R.domain, self.m, self.nx, self.cons, self.ptr,
                                np.asarray(fixed, dtype=np.int64), xs)
        return tuple(int(v) for v in xs[:self.nx]) if ok else None


def q_program(k: int, m: int) -> _Program:
    """Conditions (a)-(c) of the width-m gadget; fixed values are a_1,b_1,...,a_m,b_m."""
    nx = k - 1
    a = [_fixed(2 * i) for i in range(m)]
    b = [_fixed(2 * i + 1) for i in range(m)]
    cons = _phi(list(range(m - 1, nx)) + [a[m - 1], b[m - 1]], m)
    for i in range(m - 1):
        cons += _phi([i, a[i], b[i]], m)
    pool = list(range(nx)) + [s for i in range(m) for s in (a[i], b[i])]
    for i, j in itertools.permutations(range(nx), 2):
        for ys in itertools.product(pool, repeat=m - 2):
            cons += list(set(itertools.permutations((i, j) + ys)))
    return _Program(nx, m, cons)


def q2_program(k: int) -> _Program:
    """The width-2 gadget: phi_{k-1}(x_1..x_{k-1}), phi_k(x_2..x_{k-1},a_2,b_2), phi_3(x_1,a_1,b_1)."""
    nx = k - 1
    a1, b1, a2, b2 = (_fixed(i) for i in range(4))
    cons = _phi(list(range(nx)), 2)
    cons += _phi(list(range(1, nx)) + [a2, b2], 2)
    cons += _phi([0, a1, b1], 2)
    return _Program(nx, 2, cons)


@dataclass
class Gadget:
    relation: Relation
    base_domain: int
    witnesses: Dict[Tuple[int, ...], Tuple[int, ...]] = field(default_factory=dict)
    candidates: int = 0

    def decode(self, e: int) -> Tuple[int, int]:
        return divmod(e, self.base_domain)

    def encode(self, a: int, b: int) -> int:
        return a * self.base_domain + b

    def loops(self) -> List[int]:
        return [t[0] for t in self.relation.tuples if all(e == t[0] for e in t)]

    def to_json(self) -> dict:
        return {
            "domain": self.relation.domain,
            "arity": self.relation.arity,
            "tuples": [list(t) for t in self.relation.tuples],
            "encoding": "a*d+b",
            "base_domain": self.base_domain,
            "witnesses": {",".join(map(str, t)): list(x) for t, x in self.witnesses.items()},
        }


def _run(R: Relation, prog: _Program, k: int, work_budget: int, time_limit: float) -> Gadget:
    d, m = R.domain, R.arity
    work = d ** (k - 1) * (d * d) ** m
    if work > work_budget:
        raise BudgetExceeded("gadget search d^(k-1)*(d^2)^m", work, work_budget)
    deadline = None if time_limit is None else time.monotonic() + time_limit
    tuples, witnesses = [], {}
    pairs = list(itertools.product(range(d), repeat=2))
    count = 0
    for cand in itertools.product(pairs, repeat=m):
        count += 1
        if deadline is not None and count % 256 == 0 and time.monotonic() > deadline:
            raise BudgetExceeded("gadget search seconds", f">{time_limit}", time_limit)
        fixed = [v for pair in cand for v in pair]
        xs = prog.solve(R, fixed)
        if xs is not None:
            t = tuple(a * d + b for a, b in cand)
            tuples.append(t)
            witnesses[t] = xs
    return Gadget(Relation(d * d, m, tuples), d, witnesses, count)


def build_q_gadget(R: Relation, k: int, work_budget: int = DEFAULT_WORK_BUDGET,
                   time_limit: float = None) -> Gadget:
    """Q over pairs: ((a_i, b_i))_i is in Q iff some x_1..x_{k-1} satisfy

    (a) phi_{k+2-m}(x_m..x_{k-1}, a_m, b_m),
    (b) phi_3(x_i, a_i, b_i) for i < m,
    (c) every reordering of (x_i, x_j, y_3..y_m) is in R, for distinct
        i, j and all y's among the x's, a's and b's.
    """
    m = R.arity
    if m < 2:
        raise LoopCondError("the gadget needs arity at least 2")
    if k < max(4, m + 1):
        raise LoopCondError(f"the gadget needs k >= max(4, m+1) = {max(4, m + 1)}")
    return _run(R, q_program(k, m), k, work_budget, time_limit)


def build_q2_gadget(R: Relation, k: int, work_budget: int = DEFAULT_WORK_BUDGET,
                    time_limit: float = None) -> Gadget:
    if R.arity != 2:
        raise LoopCondError("the width-2 gadget needs a binary relation")
    if k < 4:
        raise LoopCondError("the width-2 gadget needs k >= 4")
    return _run(R, q2_program(k), k, work_budget, time_limit)
