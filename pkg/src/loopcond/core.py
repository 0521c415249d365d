"""Loop conditions, finite relations and finite algebras.

A loop condition ``f(x11,...,x1n) = ... = f(xm1,...,xmn)`` is stored as its
m x n variable matrix. Its associated relation has the variables as domain
(numbered by first occurrence, row-major) and the matrix columns as tuples.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ArityError, LoopCondError, ParseError
from .terms import IDENT, App, Term, Var, _read_term, _Reader, format_term, positional, signature, variables

COMPOSE_MARKS = ("∘", ".")
EQUALS_MARKS = ("=", "≈")


@dataclass(frozen=True)
class LoopCondition:
    matrix: Tuple[Tuple[str, ...], ...]
    symbol: str = "f"
    pseudo: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        matrix = tuple(tuple(row) for row in self.matrix)
        object.__setattr__(self, "matrix", matrix)
        if len(matrix) < 2:
            raise LoopCondError("a loop condition needs at least 2 rows")
        n = len(matrix[0])
        if n < 1:
            raise LoopCondError("a loop condition needs arity at least 1")
        if any(len(row) != n for row in matrix):
            raise ArityError("all rows of a loop condition must have the same arity")
        for row in matrix:
            for v in row:
                if not IDENT.fullmatch(v):
                    raise LoopCondError(f"invalid variable name {v!r}")
        if self.pseudo is not None:
            pseudo = tuple(self.pseudo)
            object.__setattr__(self, "pseudo", pseudo)
            if len(pseudo) != len(matrix):
                raise LoopCondError("pseudo condition needs one unary symbol per row")

    @property
    def rows(self) -> int:
        return len(self.matrix)

    width = rows

    @property
    def arity(self) -> int:
        return len(self.matrix[0])

    @property
    def columns(self) -> List[Tuple[str, ...]]:
        return list(zip(*self.matrix))

    @cached_property
    def variables(self) -> Tuple[str, ...]:
        return tuple(dict.fromkeys(v for row in self.matrix for v in row))

    def plain(self) -> "LoopCondition":
        return LoopCondition(self.matrix, self.symbol)

    def as_pseudo(self, unary: Sequence[str] = None) -> "LoopCondition":
        if unary is None:
            unary = [f"u{i + 1}" for i in range(self.rows)]
        return LoopCondition(self.matrix, self.symbol, tuple(unary))

    def duplicate_last_row(self) -> "LoopCondition":
        pseudo = None if self.pseudo is None else self.pseudo + (self.pseudo[-1],)
        return LoopCondition(self.matrix + (self.matrix[-1],), self.symbol, pseudo)

    def __str__(self):
        parts = []
        for i, row in enumerate(self.matrix):
            s = f"{self.symbol}({','.join(row)})"
            if self.pseudo is not None:
                s = f"{self.pseudo[i]}∘{s}"
            parts.append(s)
        return " = ".join(parts)


@dataclass(frozen=True)
class Relation:
    domain: int
    arity: int
    tuples: Tuple[Tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.domain < 1:
            raise LoopCondError("relation domain must be positive")
        if self.arity < 1:
            raise LoopCondError("relation arity must be positive")
        tuples = tuple(sorted({tuple(int(e) for e in t) for t in self.tuples}))
        for t in tuples:
            if len(t) != self.arity:
                raise ArityError(f"tuple {t} does not have arity {self.arity}")
            if any(e < 0 or e >= self.domain for e in t):
                raise LoopCondError(f"tuple {t} leaves the domain 0..{self.domain - 1}")
        object.__setattr__(self, "tuples", tuples)

    def __len__(self):
        return len(self.tuples)

    def __iter__(self):
        return iter(self.tuples)

    def __contains__(self, t):
        return tuple(t) in self.tuple_set

    @cached_property
    def tuple_set(self) -> FrozenSet[Tuple[int, ...]]:
        return frozenset(self.tuples)

    @cached_property
    def mask(self) -> np.ndarray:
        """Flat membership array indexed by the base-``domain`` tuple code."""
        m = np.zeros(self.domain ** self.arity, dtype=np.uint8)
        for t in self.tuples:
            code = 0
            for e in t:
                code = code * self.domain + e
            m[code] = 1
        return m

    def rename(self, mapping: Sequence[int], domain: int = None) -> "Relation":
        domain = self.domain if domain is None else domain
        return Relation(domain, self.arity, [tuple(mapping[e] for e in t) for t in self.tuples])


@dataclass(frozen=True, eq=False)
class Operation:
    name: str
    arity: int
    table: np.ndarray


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    size: int
    operations: Tuple[Operation, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.size < 1:
            raise LoopCondError("algebra size must be positive")
        ops = []
        for op in self.operations:
            if not isinstance(op, Operation):
                name, arity, table = op
                op = Operation(name, arity, table)
            table = np.asarray(op.table, dtype=np.int64).ravel()
            if not IDENT.fullmatch(op.name):
                raise LoopCondError(f"invalid operation name {op.name!r}")
            if op.arity < 0 or len(table) != self.size ** op.arity:
                raise ArityError(
                    f"operation {op.name} of arity {op.arity} needs a table of "
                    f"length {self.size ** max(op.arity, 0)}, got {len(table)}")
            if len(table) and (table.min() < 0 or table.max() >= self.size):
                raise LoopCondError(f"operation {op.name} has entries outside the domain")
            table.setflags(write=False)
            ops.append(Operation(op.name, op.arity, table))
        names = [op.name for op in ops]
        if len(set(names)) != len(names):
            raise LoopCondError("duplicate operation names")
        object.__setattr__(self, "operations", tuple(ops))

    @classmethod
    def from_function(cls, size: int, ops: Mapping[str, Tuple[int, callable]]) -> "FiniteAlgebra":
        """Tabulate python functions: ``{"min": (2, min)}``."""
        built = []
        for name, (arity, fn) in ops.items():
            table = [fn(*args) for args in itertools.product(range(size), repeat=arity)]
            built.append(Operation(name, arity, np.array(table, dtype=np.int64)))
        return cls(size, tuple(built))

    def op(self, name: str) -> Operation:
        for o in self.operations:
            if o.name == name:
                return o
        raise LoopCondError(f"unknown operation symbol {name!r}")

    @property
    def signature(self) -> Dict[str, int]:
        return {o.name: o.arity for o in self.operations}

    def with_operations(self, extra: Sequence[Operation]) -> "FiniteAlgebra":
        return FiniteAlgebra(self.size, self.operations + tuple(extra))


def table_index(args, size: int):
    """First argument most significant; works elementwise on arrays."""
    idx = 0
    for a in args:
        idx = idx * size + a
    return idx


@dataclass(frozen=True)
class IdentitySystem:
    identities: Tuple[Tuple[Term, Term], ...]
    signature: Dict[str, int] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        ids = tuple((l, r) for l, r in self.identities)
        object.__setattr__(self, "identities", ids)
        sig: Dict[str, int] = {}
        for l, r in ids:
            signature(l, sig)
            signature(r, sig)
        declared = dict(self.signature)
        for s, k in sig.items():
            if declared.setdefault(s, k) != k:
                raise ArityError(f"symbol {s} declared with arity {declared[s]} but used with {k}")
        object.__setattr__(self, "signature", declared)

    @property
    def is_h1(self) -> bool:
        def flat(t):
            return isinstance(t, App) and all(isinstance(a, Var) for a in t.args)
        return all(flat(l) and flat(r) for l, r in self.identities)

    def __str__(self):
        return "\n".join(f"{format_term(l)} = {format_term(r)}" for l, r in self.identities)


def _read_equals(r: _Reader) -> bool:
    ch = r.peek()
    if ch in EQUALS_MARKS:
        r.pos += 1
        return True
    return False


def parse_condition(text: str) -> LoopCondition:
    r = _Reader(text)
    apps = []
    while True:
        r.skip()
        start = r.pos
        name = r.ident()
        unary = None
        if r.peek() in COMPOSE_MARKS:
            r.pos += 1
            unary = name
            name = r.ident()
        r.expect("(")
        args = [r.ident()]
        while r.peek() == ",":
            r.pos += 1
            args.append(r.ident())
        r.expect(")")
        apps.append((start, unary, name, tuple(args)))
        if r.at_end():
            break
        if not _read_equals(r):
            raise ParseError(f"expected '=', found {r.peek()!r}", text, r.pos)
    if len(apps) < 2:
        raise ParseError("a loop condition needs at least 2 occurrences of its symbol", text, 0)
    pos0, _, head, args0 = apps[0]
    for pos, _, name, args in apps[1:]:
        if name != head:
            raise ParseError(f"mixed head symbols {head!r} and {name!r}", text, pos)
        if len(args) != len(args0):
            raise ParseError(f"mismatched arities {len(args0)} and {len(args)}", text, pos)
    unaries = [u for _, u, _, _ in apps]
    if any(u is None for u in unaries) and any(u is not None for u in unaries):
        raise ParseError("either every occurrence or none carries a unary prefix", text, pos0)
    pseudo = None if unaries[0] is None else tuple(unaries)
    return LoopCondition(tuple(a for _, _, _, a in apps), head, pseudo)


def parse_identities(text: str) -> IdentitySystem:
    """One identity ``s = t`` per line (or separated by ';'); '#' starts a comment."""
    ids = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        for chunk in line.split(";"):
            if not chunk.strip():
                continue
            r = _Reader(chunk)
            lhs = _read_term(r)
            if not _read_equals(r):
                raise ParseError(f"expected '=', found {r.peek()!r}", chunk, r.pos)
            rhs = _read_term(r)
            if not r.at_end():
                raise ParseError(f"unexpected {r.peek()!r}", chunk, r.pos)
            ids.append((lhs, rhs))
    if not ids:
        raise ParseError("no identities found", text, 0)
    return IdentitySystem(tuple(ids))


def relation_of(L: LoopCondition) -> Tuple[Relation, Dict[str, int]]:
    index = {v: i for i, v in enumerate(L.variables)}
    tuples = [tuple(index[v] for v in col) for col in L.columns]
    return Relation(len(index), L.rows, tuples), index


def condition_of(R: Relation, symbol: str = "f") -> LoopCondition:
    if R.arity < 2:
        raise LoopCondError("a loop condition needs width at least 2")
    if not R.tuples:
        raise LoopCondError("the empty relation has no loop condition")
    names = [f"v{e}" for e in range(R.domain)]
    matrix = [tuple(names[t[i]] for t in R.tuples) for i in range(R.arity)]
    return LoopCondition(tuple(matrix), symbol)


def is_trivial(L: LoopCondition) -> bool:
    return any(len(set(col)) == 1 for col in L.columns)


def eval_term(A: FiniteAlgebra, t: Term, a: Mapping[str, object]):
    """Evaluate bottom-up; assignment values may be ints or integer arrays."""
    if isinstance(t, Var):
        try:
            return a[t.name]
        except KeyError:
            raise LoopCondError(f"variable {t.name} is not assigned") from None
    op = A.op(t.symbol)
    if op.arity != len(t.args):
        raise ArityError(f"{t.symbol} has arity {op.arity} but is applied to {len(t.args)} arguments")
    return op.table[table_index([eval_term(A, s, a) for s in t.args], A.size)]


def all_assignments(size: int, names: Sequence[str]) -> Dict[str, np.ndarray]:
    """Every assignment names -> {0..size-1}, lexicographic, first name most significant."""
    k = len(names)
    grid = np.indices((size,) * k).reshape(k, -1) if k else np.zeros((0, 1), dtype=np.int64)
    return {v: grid[i].astype(np.int64) for i, v in enumerate(names)}


def _check_witness_vars(t: Term, n: int, what: str):
    allowed = {p.name for p in positional(n)}
    extra = [v for v in variables(t) if v not in allowed]
    if extra:
        raise ArityError(f"{what} uses variables {extra} outside x1..x{n}")


WitnessLike = Union[Term, Mapping[str, Term]]


def verify_witness(A: FiniteAlgebra, L: LoopCondition, witness: WitnessLike) -> bool:
    """Check a witness on all |A|^|V| assignments.

    The witness for the head symbol is a term in x1..xn. For a pseudo
    condition pass a mapping that also gives a term in x1 for every unary
    symbol.
    """
    if isinstance(witness, (Var, App)):
        witness = {L.symbol: witness}
    if L.symbol not in witness:
        raise LoopCondError(f"no witness given for {L.symbol}")
    f = witness[L.symbol]
    _check_witness_vars(f, L.arity, f"witness for {L.symbol}")
    unary = [None] * L.rows
    if L.pseudo is not None:
        for i, u in enumerate(L.pseudo):
            if u not in witness:
                raise LoopCondError(f"no witness given for unary symbol {u}")
            _check_witness_vars(witness[u], 1, f"witness for {u}")
            unary[i] = witness[u]
    env = all_assignments(A.size, L.variables)
    values = []
    for row, u in zip(L.matrix, unary):
        val = eval_term(A, f, {f"x{j + 1}": env[v] for j, v in enumerate(row)})
        val = np.broadcast_to(val, env[L.variables[0]].shape)
        if u is not None:
            val = np.broadcast_to(eval_term(A, u, {"x1": val}), val.shape)
        values.append(val)
    return all(np.array_equal(values[0], v) for v in values[1:])
