"""Terms over a functional signature, with a small recursive-descent parser.

Terms print in the same syntax the parser reads: ``f(x,g(y,x))``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Tuple, Union

from .errors import ArityError, ParseError

IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if not IDENT.fullmatch(self.name):
            raise ValueError(f"invalid variable name {self.name!r}")

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    symbol: str
    args: Tuple["Term", ...]

    def __post_init__(self):
        if not IDENT.fullmatch(self.symbol):
            raise ValueError(f"invalid symbol {self.symbol!r}")
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))

    def __str__(self):
        return format_term(self)


Term = Union[Var, App]


def app(symbol: str, *args: Term) -> App:
    return App(symbol, tuple(args))


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    return t.symbol + "(" + ",".join(format_term(a) for a in t.args) + ")"


def depth(t: Term) -> int:
    if isinstance(t, Var):
        return 0
    return 1 + max((depth(a) for a in t.args), default=0)


def size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(size(a) for a in t.args)


def variables(t: Term) -> List[str]:
    """Variable names in order of first occurrence."""
    seen: Dict[str, None] = {}
    for s in subterms(t):
        if isinstance(s, Var):
            seen.setdefault(s.name)
    return list(seen)


def subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        if isinstance(s, App):
            stack.extend(reversed(s.args))


def signature(t: Term, sig: Dict[str, int] = None) -> Dict[str, int]:
    """Collect symbol arities, raising ArityError on inconsistent use."""
    sig = {} if sig is None else sig
    for s in subterms(t):
        if isinstance(s, App):
            k = sig.setdefault(s.symbol, len(s.args))
            if k != len(s.args):
                raise ArityError(
                    f"symbol {s.symbol} used with arities {k} and {len(s.args)}")
    return sig


def substitute(t: Term, sub: Mapping[str, Term]) -> Term:
    """Simultaneous substitution of variables; unmapped variables stay."""
    if isinstance(t, Var):
        return sub.get(t.name, t)
    return App(t.symbol, tuple(substitute(a, sub) for a in t.args))


def positional(n: int, prefix: str = "x") -> Tuple[Var, ...]:
    """The variables x1..xn used for the arguments of an n-ary witness term."""
    return tuple(Var(f"{prefix}{i + 1}") for i in range(n))


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            found = self.peek() or "end of input"
            raise ParseError(f"expected {ch!r}, found {found!r}", self.text, self.pos)
        self.pos += 1

    def ident(self) -> str:
        self.skip()
        m = IDENT.match(self.text, self.pos)
        if not m:
            found = self.peek() or "end of input"
            raise ParseError(f"expected identifier, found {found!r}", self.text, self.pos)
        self.pos = m.end()
        return m.group()

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)


def _read_term(r: _Reader) -> Term:
    name = r.ident()
    if r.peek() != "(":
        return Var(name)
    r.expect("(")
    if r.peek() == ")":
        r.pos += 1
        return App(name, ())
    args = [_read_term(r)]
    while r.peek() == ",":
        r.pos += 1
        args.append(_read_term(r))
    r.expect(")")
    return App(name, tuple(args))


def parse_term(text: str) -> Term:
    r = _Reader(text)
    t = _read_term(r)
    if not r.at_end():
        raise ParseError(f"unexpected {r.peek()!r}", text, r.pos)
    signature(t)
    return t
