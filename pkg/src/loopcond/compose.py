"""Syntactic constructions on terms: star composition, idempotent
normalisation, Taylor identities to a width-3 loop condition, and h1
identities to Taylor identities.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .core import FiniteAlgebra, IdentitySystem, LoopCondition, all_assignments, eval_term
from .errors import ArityError, LoopCondError
from .terms import App, Term, Var, positional, substitute


@dataclass(frozen=True)
class Fn:
    """A term together with the ordered list of its argument variables."""

    params: Tuple[str, ...]
    body: Term

    @classmethod
    def symbol(cls, name: str, arity: int) -> "Fn":
        xs = positional(arity)
        return cls(tuple(x.name for x in xs), App(name, xs))

    @property
    def arity(self) -> int:
        return len(self.params)

    def __call__(self, *args: Term) -> Term:
        if len(args) != self.arity:
            raise ArityError(f"expected {self.arity} arguments, got {len(args)}")
        return substitute(self.body, dict(zip(self.params, args)))


FnLike = Union[Fn, Tuple[str, int]]


def _as_fn(f: FnLike) -> Fn:
    if isinstance(f, Fn):
        return f
    name, arity = f
    return Fn.symbol(name, arity)


def star(f: FnLike, g: FnLike) -> Fn:
    """f applied to n copies of g on fresh variables, row-major.

    Argument x_{i,j} (row i for the i-th argument of f, column j for the
    j-th argument of g) is the parameter at position (i-1)*m + j.
    """
    f, g = _as_fn(f), _as_fn(g)
    n, m = f.arity, g.arity
    if n < 1 or m < 1:
        raise ArityError("star needs arities at least 1")
    xs = positional(n * m)
    body = f(*[g(*xs[i * m:(i + 1) * m]) for i in range(n)])
    return Fn(tuple(x.name for x in xs), body)


def star_all(fns: Sequence[FnLike]) -> Fn:
    out = _as_fn(fns[0])
    for g in fns[1:]:
        out = star(out, g)
    return out


def idem_normalize(t: Term) -> Term:
    """Innermost rewriting of s(u,...,u) to u."""
    if isinstance(t, Var):
        return t
    args = tuple(idem_normalize(a) for a in t.args)
    if args and all(a == args[0] for a in args[1:]):
        return args[0]
    return App(t.symbol, args)


@dataclass(frozen=True)
class TaylorSystem:
    """n identities t(lhs_i) = t(rhs_i) over {x, y}; lhs_i has x and rhs_i has y at i.

    ``unary`` optionally names the outer unary symbols (u_i, v_i) of the
    pseudo-Taylor shape.
    """

    rows: Tuple[Tuple[str, str], ...]
    symbol: str = "t"
    unary: Optional[Tuple[Tuple[str, str], ...]] = None

    def __post_init__(self):
        rows = tuple((str(l), str(r)) for l, r in self.rows)
        object.__setattr__(self, "rows", rows)
        n = len(rows)
        if n < 1:
            raise LoopCondError("a Taylor system needs at least one identity")
        for i, (l, r) in enumerate(rows):
            if len(l) != n or len(r) != n:
                raise LoopCondError(f"identity {i + 1} does not have arity {n}")
            if set(l + r) - {"x", "y"}:
                raise LoopCondError(f"identity {i + 1} uses variables other than x, y")
            if l[i] != "x" or r[i] != "y":
                raise LoopCondError(f"identity {i + 1} needs x on the left and y on the right at position {i + 1}")
        if self.unary is not None and len(self.unary) != n:
            raise LoopCondError("need one pair of unary symbols per identity")

    @property
    def arity(self) -> int:
        return len(self.rows)

    @classmethod
    def from_identities(cls, S: IdentitySystem) -> "TaylorSystem":
        rows = []
        symbols = set()
        for lhs, rhs in S.identities:
            for side in (lhs, rhs):
                if not isinstance(side, App) or not all(isinstance(a, Var) for a in side.args):
                    raise LoopCondError("Taylor identities must be height 1")
                symbols.add(side.symbol)
            rows.append(("".join(a.name for a in lhs.args), "".join(a.name for a in rhs.args)))
        if len(symbols) != 1:
            raise LoopCondError(f"Taylor identities use one symbol, found {sorted(symbols)}")
        return cls(tuple(rows), symbols.pop())

    def identities(self) -> IdentitySystem:
        def side(p):
            return App(self.symbol, tuple(Var(c) for c in p))
        return IdentitySystem(tuple((side(l), side(r)) for l, r in self.rows))

    def rejects_projections(self) -> bool:
        """No projection satisfies every identity (exhaustive over all n)."""
        return all(any(l[j] != r[j] for l, r in self.rows) for j in range(self.arity))


def verify_taylor(A: FiniteAlgebra, T: TaylorSystem, witness: Term) -> bool:
    """Check the Taylor identities with t interpreted by ``witness`` (a term in x1..xn)."""
    env = all_assignments(A.size, ["x", "y"])
    xs = [p.name for p in positional(T.arity)]
    for l, r in T.rows:
        lv = eval_term(A, witness, {x: env[c] for x, c in zip(xs, l)})
        rv = eval_term(A, witness, {x: env[c] for x, c in zip(xs, r)})
        if not np.array_equal(np.broadcast_to(lv, env["x"].shape), np.broadcast_to(rv, env["x"].shape)):
            return False
    return True


@dataclass
class Width3Output:
    condition: LoopCondition
    h: Fn
    substitutions: Tuple[Tuple[str, ...], Tuple[str, ...], Tuple[str, ...]]
    n: int

    def witness(self) -> Dict[str, Term]:
        return {self.condition.symbol: self.h.body}

    def position(self, i: int, j: int, k: int) -> int:
        """0-based argument position of z_{i,j,k} (1-based indices)."""
        return ((i - 1) * self.n + (j - 1)) * self.n + (k - 1)

    def column(self, i: int, j: int, k: int) -> Tuple[str, str, str]:
        p = self.position(i, j, k)
        return tuple(z[p] for z in self.substitutions)

    def substitution_tables(self) -> dict:
        out = {}
        for name, z in zip(("z1", "z2", "z3"), self.substitutions):
            out[name] = {
                f"{i},{j},{k}": z[self.position(i, j, k)]
                for i, j, k in itertools.product(range(1, self.n + 1), repeat=3)
            }
        return out


def taylor_to_width3(T: TaylorSystem, head: str = "h") -> Width3Output:
    """The width-3 loop condition satisfied by h = t*t*t in any idempotent
    algebra where t satisfies T.

    Row i of T is first given its own two variables a_i (for x) and b_i
    (for y). Position (i,j,k) of h then receives x_{i,j}, y_{i,j} and
    x_{j,k} in the three rows, where x_{i,j} / y_{i,j} is the variable at
    position j on the left / right of identity i.
    """
    n = T.arity

    def var(i, c):
        return f"a{i + 1}" if c == "x" else f"b{i + 1}"

    X = [[var(i, T.rows[i][0][j]) for j in range(n)] for i in range(n)]
    Y = [[var(i, T.rows[i][1][j]) for j in range(n)] for i in range(n)]
    z1, z2, z3 = [], [], []
    for i, j, k in itertools.product(range(n), repeat=3):
        z1.append(X[i][j])
        z2.append(Y[i][j])
        z3.append(X[j][k])
        if i == j:
            assert z1[-1] != z2[-1], (i, j, k)
        else:
            assert z1[-1] != z3[-1], (i, j, k)
    t = (T.symbol, n)
    h = star(star(t, t), t)
    cond = LoopCondition((tuple(z1), tuple(z2), tuple(z3)), head)
    return Width3Output(cond, h, (tuple(z1), tuple(z2), tuple(z3)), n)


def projection_satisfiable(S: IdentitySystem) -> Optional[Dict[str, int]]:
    """A choice of projection (0-based position) per symbol satisfying S, if any."""
    symbols = list(S.signature)
    for choice in itertools.product(*(range(S.signature[s]) for s in symbols)):
        proj = dict(zip(symbols, choice))
        if all(l.args[proj[l.symbol]] == r.args[proj[r.symbol]] for l, r in S.identities):
            return proj
    return None


@dataclass
class H1TaylorOutput:
    taylor: TaylorSystem
    witness: Fn
    factors: Tuple[str, ...]
    substitutions: List[Tuple[Tuple[str, ...], Tuple[str, ...]]]
    phi: List[int]

    @property
    def ell(self) -> int:
        return self.witness.arity


def h1_to_taylor(S: IdentitySystem, idempotent: bool = True) -> H1TaylorOutput:
    """Taylor identities satisfied by t = f_1*...*f_m*g_1*...*g_m in every
    idempotent algebra satisfying the h1 system S (identity i being
    f_i(...) = g_i(...)).

    Each side collapses to t by substituting, at every argument position of
    t, the variable that side places at the coordinate belonging to the
    first star factor carrying its symbol. Position j of t is then assigned
    the first identity whose two sides disagree there, and the variable the
    left side puts at j becomes x, every other variable y.

    With ``idempotent=False`` the emitted system carries unary markers
    (u_j, v_j) in the pseudo-Taylor shape; the witness is the same.
    """
    if not S.is_h1:
        raise LoopCondError("h1_to_taylor needs height-1 identities")
    if projection_satisfiable(S) is not None:
        raise LoopCondError("the identity system is trivial: projections satisfy it")
    factors = tuple(l.symbol for l, _ in S.identities) + tuple(r.symbol for _, r in S.identities)
    arities = [S.signature[s] for s in factors]
    first = {}
    for p, s in enumerate(factors):
        first.setdefault(s, p)
    t = star_all([(s, S.signature[s]) for s in factors])
    ell = math.prod(arities)
    positions = list(itertools.product(*(range(k) for k in arities)))
    assert len(positions) == ell == t.arity

    subs = []
    for lhs, rhs in S.identities:
        zf = tuple(lhs.args[J[first[lhs.symbol]]].name for J in positions)
        zg = tuple(rhs.args[J[first[rhs.symbol]]].name for J in positions)
        subs.append((zf, zg))

    phi, rows = [], []
    for j in range(ell):
        i = next((i for i, (zf, zg) in enumerate(subs) if zf[j] != zg[j]), None)
        if i is None:
            raise AssertionError(f"no identity disagrees at position {j}; S should be trivial")
        phi.append(i)
        zf, zg = subs[i]
        v = zf[j]
        rows.append(("".join("x" if z == v else "y" for z in zf),
                     "".join("x" if z == v else "y" for z in zg)))
    unary = None if idempotent else tuple((f"u{j + 1}", f"v{j + 1}") for j in range(ell))
    T = TaylorSystem(tuple(rows), "t", unary)
    assert T.rejects_projections()
    return H1TaylorOutput(T, t, factors, subs, phi)
