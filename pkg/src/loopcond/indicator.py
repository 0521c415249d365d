"""Deciding loop conditions in a finite algebra by subpower generation.

For a condition L with variable set V, the n projection columns are vectors
in (A^(A^V))^m. Their closure under the basic operations of A is exactly the
set of n-ary term operations evaluated on those columns, so A satisfies L
iff some closure element has m equal blocks; the term that produced it is
the witness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import _kernels
from .core import FiniteAlgebra, LoopCondition, all_assignments, verify_witness
from .errors import BudgetExceeded, LoopCondError
from .terms import App, Term, positional

DEFAULT_CELL_BUDGET = 64
DEFAULT_MAX_SIZE = 2 ** 22
DEFAULT_MAX_APPLICATIONS = 2 ** 31
CHUNK = 2 ** 17


@dataclass
class IndicatorInstance:
    size: int
    condition: LoopCondition
    assignments: np.ndarray  # (|D|, |V|), lexicographic
    generators: np.ndarray  # (n, m * |D|) uint8
    provenance: Tuple[Term, ...]

    @property
    def block(self) -> int:
        return self.assignments.shape[0]

    @property
    def width(self) -> int:
        return self.generators.shape[1]


def build_indicator(A: FiniteAlgebra, L: LoopCondition, budget: int = DEFAULT_CELL_BUDGET) -> IndicatorInstance:
    V = L.variables
    cells = A.size ** len(V) * L.rows
    if cells > budget:
        raise BudgetExceeded("indicator cells |A|^|V|*m", cells, budget)
    env = all_assignments(A.size, V)
    assignments = np.stack([env[v] for v in V], axis=1)
    gens = np.empty((L.arity, cells), dtype=np.uint8)
    for j, col in enumerate(L.columns):
        gens[j] = np.concatenate([env[v] for v in col])
    return IndicatorInstance(A.size, L, assignments, gens, positional(L.arity))


@dataclass
class Closure:
    vectors: np.ndarray
    depth: np.ndarray
    op_index: np.ndarray  # -1 for generators
    args: List[Tuple[int, ...]]
    names: Tuple[str, ...]
    provenance: Tuple[Term, ...]
    generator_of: List[int]
    levels: List[int] = field(default_factory=list)
    complete: bool = True
    found: Optional[int] = None
    applications: int = 0
    _terms: Dict[int, Term] = field(default_factory=dict, repr=False)

    def __len__(self):
        return self.vectors.shape[0]

    @property
    def max_depth(self) -> int:
        return int(self.depth.max()) if len(self.depth) else 0

    def term(self, i: int) -> Term:
        """The witnessing term of element i, in the generator variables."""
        stack = [i]
        while stack:
            j = stack[-1]
            if j in self._terms:
                stack.pop()
                continue
            if self.op_index[j] < 0:
                self._terms[j] = self.provenance[self.generator_of[j]]
                stack.pop()
                continue
            missing = [a for a in self.args[j] if a not in self._terms]
            if missing:
                stack.extend(missing)
                continue
            self._terms[j] = App(self.names[self.op_index[j]], tuple(self._terms[a] for a in self.args[j]))
            stack.pop()
        return self._terms[i]

    def stats(self) -> dict:
        return {
            "size": len(self),
            "depth": self.max_depth,
            "levels": len(self.levels),
            "complete": self.complete,
            "applications": self.applications,
            "backend": _kernels.backend(),
        }


class _Keys:
    """Hashable keys for vectors: one uint64 when bits * width <= 64, byte rows otherwise."""

    def __init__(self, size: int, width: int):
        self.bits = max(1, math.ceil(math.log2(size))) if size > 1 else 1
        self.packed = self.bits * width <= 64

    def __call__(self, rows: np.ndarray) -> np.ndarray:
        if self.packed:
            return _kernels.pack_keys(np.ascontiguousarray(rows), self.bits)
        rows = np.ascontiguousarray(rows)
        return rows.view(np.dtype((np.void, rows.shape[1]))).ravel()


def _blocks(arity: int, f0: int, count: int):
    """Argument index ranges for one level: tuples with a first frontier argument at p."""
    for p in range(arity):
        lo = [0] * p + [f0] + [0] * (arity - 1 - p)
        hi = [f0] * p + [count] + [count] * (arity - 1 - p)
        yield np.array(lo, dtype=np.int64), np.array(hi, dtype=np.int64) - np.array(lo, dtype=np.int64)


def generate_closure(
    A: FiniteAlgebra,
    inst: IndicatorInstance,
    max_size: int = DEFAULT_MAX_SIZE,
    max_applications: int = DEFAULT_MAX_APPLICATIONS,
    stop: Callable[[np.ndarray], np.ndarray] = None,
) -> Closure:
    """Breadth-first closure of the generators under the operations of A.

    Level d holds the vectors first reached by a term of depth d. Within a
    level, operations are tried in algebra order; for each operation the
    argument tuples are grouped by the position of their first argument
    from the previous level, lexicographically inside each group. Every
    element keeps the first term that reached it. ``stop`` maps a batch of
    new vectors to a boolean mask; the first hit ends the search.
    """
    keyer = _Keys(A.size, inst.width)
    seen: Dict[object, int] = {}
    rows: List[np.ndarray] = []
    generator_of: List[int] = []
    for j, g in enumerate(inst.generators):
        key = keyer(g[None, :])[0].item() if keyer.packed else bytes(g)
        if key not in seen:
            seen[key] = len(rows)
            rows.append(g)
            generator_of.append(j)
    vecs = np.array(rows, dtype=np.uint8).reshape(len(rows), inst.width)
    depth = [0] * len(rows)
    op_index = [-1] * len(rows)
    args: List[Tuple[int, ...]] = [()] * len(rows)
    clo = Closure(vecs, np.array(depth), np.array(op_index), args,
                  tuple(o.name for o in A.operations), inst.provenance, generator_of, [0])

    def finish(found=None, complete=True):
        clo.vectors = vecs[:count]
        clo.depth = np.array(depth, dtype=np.int64)
        clo.op_index = np.array(op_index, dtype=np.int64)
        clo.found = found
        clo.complete = complete
        return clo

    count = len(rows)
    if stop is not None:
        hits = np.flatnonzero(stop(vecs[:count]))
        if len(hits):
            return finish(int(hits[0]), complete=False)

    capacity = max(count, 1024)
    buf = np.empty((capacity, inst.width), dtype=np.uint8)
    buf[:count] = vecs
    vecs = buf
    f0, level = 0, 0
    while f0 < count:
        level += 1
        frontier_end = count
        for oi, op in enumerate(A.operations):
            if op.arity == 0:
                if level > 1:
                    continue
                blocks = [(np.zeros(0, np.int64), np.zeros(0, np.int64))]
            else:
                blocks = _blocks(op.arity, f0, frontier_end)
            for lo, extent in blocks:
                total = int(np.prod(extent)) if len(extent) else 1
                for start in range(0, total, CHUNK):
                    stop_at = min(total, start + CHUNK)
                    clo.applications += stop_at - start
                    if clo.applications > max_applications:
                        raise BudgetExceeded("closure operation applications", clo.applications, max_applications)
                    lin = np.arange(start, stop_at, dtype=np.int64)
                    if len(extent):
                        idx = np.stack(np.unravel_index(lin, tuple(extent)), axis=1) + lo
                        out = _kernels.apply_op(op.table, A.size, vecs[:frontier_end], idx)
                    else:
                        idx = np.zeros((1, 0), dtype=np.int64)
                        out = np.broadcast_to(op.table[0], (1, inst.width)).astype(np.uint8)
                    keys = keyer(out)
                    _, first = np.unique(keys, return_index=True)
                    first.sort()
                    new_pos = []
                    for pos, key in zip(first.tolist(), keys[first].tolist()):
                        if key not in seen:
                            seen[key] = count + len(new_pos)
                            new_pos.append(pos)
                    if not new_pos:
                        continue
                    if count + len(new_pos) > max_size:
                        raise BudgetExceeded("closure size", count + len(new_pos), max_size)
                    while count + len(new_pos) > vecs.shape[0]:
                        grown = np.empty((vecs.shape[0] * 2, inst.width), dtype=np.uint8)
                        grown[:count] = vecs[:count]
                        vecs = grown
                    new_rows = out[new_pos]
                    vecs[count:count + len(new_pos)] = new_rows
                    for pos in new_pos:
                        depth.append(level)
                        op_index.append(oi)
                        args.append(tuple(int(a) for a in idx[pos]))
                    base = count
                    count += len(new_pos)
                    if stop is not None:
                        hits = np.flatnonzero(stop(new_rows))
                        if len(hits):
                            clo.levels.append(f0)
                            return finish(base + int(hits[0]), complete=False)
        f0 = frontier_end
        if f0 < count:
            clo.levels.append(f0)
    return finish()


def loop_mask(m: int) -> Callable[[np.ndarray], np.ndarray]:
    def check(rows: np.ndarray) -> np.ndarray:
        blocks = rows.reshape(rows.shape[0], m, -1)
        return (blocks == blocks[:, :1, :]).all(axis=(1, 2))
    return check


def satisfies(
    A: FiniteAlgebra,
    L: LoopCondition,
    budget: int = DEFAULT_CELL_BUDGET,
    max_size: int = DEFAULT_MAX_SIZE,
    max_applications: int = DEFAULT_MAX_APPLICATIONS,
    stats: dict = None,
) -> Optional[Term]:
    """A witness term in x1..xn for L in A, or None if A does not satisfy L."""
    if L.pseudo is not None:
        raise LoopCondError("pseudo-loop conditions need a group; use grouporbit.pseudo_satisfies")
    inst = build_indicator(A, L, budget)
    clo = generate_closure(A, inst, max_size, max_applications, stop=loop_mask(L.rows))
    if stats is not None:
        stats.update(clo.stats())
    if clo.found is None:
        return None
    t = clo.term(clo.found)
    if not verify_witness(A, L, t):
        raise AssertionError(f"closure witness {t} fails verification")
    return t
