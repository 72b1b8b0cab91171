"""Terms of the shuffling call-by-value lambda calculus.

Bound variables are de Bruijn indices (``Bound``), free variables are names
(``Var``).  Binder names on ``Abs`` are display hints only and take no part
in equality, so ``==`` on terms is alpha-equivalence.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import count
from typing import Iterable, Iterator, Union

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class NonValueSubstituend(ValueError):
    pass


class _Node:
    __slots__ = ()

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((type(self).__name__,) + self._fields())
            object.__setattr__(self, "_hash", h)
        return h

    def __str__(self) -> str:
        return print_term(self)


@dataclass(frozen=True, eq=True)
class Var(_Node):
    name: str

    def _fields(self):
        return (self.name,)

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Bound(_Node):
    index: int

    def _fields(self):
        return (self.index,)

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Abs(_Node):
    body: "Term"
    hint: str = field(default="x", compare=False)

    def _fields(self):
        return (self.body,)

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class App(_Node):
    fun: "Term"
    arg: "Term"

    def _fields(self):
        return (self.fun, self.arg)

    __hash__ = _Node.__hash__


Term = Union[Var, Bound, Abs, App]


class TermClass(enum.Enum):
    VALUE = "value"
    APPLICATIVE_NORMAL = "applicative_normal"
    NORMAL = "normal"
    REDUCIBLE = "reducible"


# ---------------------------------------------------------------- index ops


def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    """Add ``by`` to every loose index at or above ``cutoff``."""
    if by == 0:
        return t
    if isinstance(t, Bound):
        return Bound(t.index + by) if t.index >= cutoff else t
    if isinstance(t, Var):
        return t
    if isinstance(t, Abs):
        return Abs(shift(t.body, by, cutoff + 1), t.hint)
    return App(shift(t.fun, by, cutoff), shift(t.arg, by, cutoff))


def instantiate(body: Term, v: Term) -> Term:
    """Contract the binder of ``Abs(body)`` with ``v``; ``v`` may have loose indices."""

    def go(t: Term, depth: int) -> Term:
        if isinstance(t, Bound):
            if t.index == depth:
                return shift(v, depth)
            return Bound(t.index - 1) if t.index > depth else t
        if isinstance(t, Var):
            return t
        if isinstance(t, Abs):
            return Abs(go(t.body, depth + 1), t.hint)
        return App(go(t.fun, depth), go(t.arg, depth))

    return go(body, 0)


def open_body(body: Term, name: str) -> Term:
    """Replace the outermost loose index of ``body`` by the free name ``name``."""
    return instantiate(body, Var(name))


def close(t: Term, name: str) -> Term:
    """Inverse of ``open_body``: free ``name`` becomes the loose index 0."""

    def go(t: Term, depth: int) -> Term:
        if isinstance(t, Var):
            return Bound(depth) if t.name == name else t
        if isinstance(t, Bound):
            return Bound(t.index + 1) if t.index >= depth else t
        if isinstance(t, Abs):
            return Abs(go(t.body, depth + 1), t.hint)
        return App(go(t.fun, depth), go(t.arg, depth))

    return go(t, 0)


def lam(name: str, body: Term) -> Abs:
    """Build ``\\name. body`` from a body that mentions ``name`` freely."""
    return Abs(close(body, name), name)


def app(*terms: Term) -> Term:
    out = terms[0]
    for t in terms[1:]:
        out = App(out, t)
    return out


# ---------------------------------------------------------------- queries


@lru_cache(maxsize=200_000)
def free_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Bound):
        return frozenset()
    if isinstance(t, Abs):
        return free_vars(t.body)
    return free_vars(t.fun) | free_vars(t.arg)


def node_count(t: Term) -> int:
    if isinstance(t, (Var, Bound)):
        return 1
    if isinstance(t, Abs):
        return 1 + node_count(t.body)
    return 1 + node_count(t.fun) + node_count(t.arg)


def is_value(t: Term) -> bool:
    return not isinstance(t, App)


def is_closed(t: Term) -> bool:
    return not free_vars(t)


def alpha_eq(t: Term, u: Term) -> bool:
    return t == u


def subst(t: Term, x: str, v: Term) -> Term:
    """Capture-free replacement of the free name ``x`` by the value ``v``."""
    if not is_value(v):
        raise NonValueSubstituend(f"cannot substitute the application {print_term(v)}")
    if x not in free_vars(t):
        return t

    def go(t: Term, depth: int) -> Term:
        if isinstance(t, Var):
            return shift(v, depth) if t.name == x else t
        if isinstance(t, Bound):
            return t
        if isinstance(t, Abs):
            return Abs(go(t.body, depth + 1), t.hint)
        return App(go(t.fun, depth), go(t.arg, depth))

    return go(t, 0)


def rename_free(t: Term, old: str, new: str) -> Term:
    return subst(t, old, Var(new))


@lru_cache(maxsize=200_000)
def is_applicative(t: Term) -> bool:
    if not isinstance(t, App):
        return False
    f, a = t.fun, t.arg
    if isinstance(f, (Var, Bound)):
        return is_value(a) or is_applicative(a)
    return is_applicative(f) and is_normal(a)


@lru_cache(maxsize=200_000)
def is_normal(t: Term) -> bool:
    if is_value(t) or is_applicative(t):
        return True
    return isinstance(t.fun, Abs) and is_normal(t.fun.body) and is_applicative(t.arg)


def classify(t: Term) -> TermClass:
    if is_value(t):
        return TermClass.VALUE
    if is_applicative(t):
        return TermClass.APPLICATIVE_NORMAL
    if is_normal(t):
        return TermClass.NORMAL
    return TermClass.REDUCIBLE


# ---------------------------------------------------------------- names


def name_supply() -> Iterator[str]:
    yield from ("x", "y", "z")
    for i in count(1):
        for base in ("x", "y", "z"):
            yield f"{base}{i}"


def fresh(avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    for name in name_supply():
        if name not in avoid:
            return name
    raise AssertionError("unreachable")


# ---------------------------------------------------------------- printing


def print_term(t: Term) -> str:
    """Render with canonical binder names and minimal parentheses."""
    taken = set(free_vars(t))

    def go(t: Term, scope: list, taken: set) -> str:
        if isinstance(t, Var):
            return t.name
        if isinstance(t, Bound):
            if t.index >= len(scope):
                raise ValueError(f"loose index {t.index} cannot be printed")
            return scope[-1 - t.index]
        if isinstance(t, Abs):
            name = fresh(taken)
            return f"\\{name}. {go(t.body, scope + [name], taken | {name})}"
        fun = go(t.fun, scope, taken)
        if isinstance(t.fun, Abs):
            fun = f"({fun})"
        arg = go(t.arg, scope, taken)
        if not isinstance(t.arg, (Var, Bound)):
            arg = f"({arg})"
        return f"{fun} {arg}"

    return go(t, [], taken)


def term_to_json(t: Term):
    """Nested ``["var", x]``, ``["lam", x, body]``, ``["app", f, a]`` with printer names."""
    taken = set(free_vars(t))

    def go(t: Term, scope: list, taken: set):
        if isinstance(t, Var):
            return ["var", t.name]
        if isinstance(t, Bound):
            return ["var", scope[-1 - t.index]]
        if isinstance(t, Abs):
            name = fresh(taken)
            return ["lam", name, go(t.body, scope + [name], taken | {name})]
        return ["app", go(t.fun, scope, taken), go(t.arg, scope, taken)]

    return go(t, [], taken)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(?P<lam>\\|λ)|(?P<dot>\.)|(?P<lp>\()|(?P<rp>\))|(?P<id>[A-Za-z_][A-Za-z0-9_']*))")


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


def parse(text: str) -> Term:
    tokens = _tokenize(text)
    i = 0

    def peek():
        return tokens[i]

    def expect(kind: str):
        nonlocal i
        tok = tokens[i]
        if tok[0] != kind:
            what = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise ParseError(f"expected {kind}, found {what}", tok[2])
        i += 1
        return tok

    # Names are resolved to indices once the whole binder chain is known.
    def term(scope: list) -> Term:
        if peek()[0] == "lam":
            expect("lam")
            name = expect("id")[1]
            expect("dot")
            body = term(scope + [name])
            return Abs(body, name)
        return application(scope)

    def application(scope: list) -> Term:
        out = atom(scope)
        while peek()[0] in ("id", "lp", "lam"):
            if peek()[0] == "lam":
                # a trailing abstraction extends to the right
                out = App(out, term(scope))
                break
            out = App(out, atom(scope))
        return out

    def atom(scope: list) -> Term:
        tok = peek()
        if tok[0] == "id":
            expect("id")
            name = tok[1]
            for depth, bound in enumerate(reversed(scope)):
                if bound == name:
                    return Bound(depth)
            return Var(name)
        if tok[0] == "lp":
            expect("lp")
            inner = term(scope)
            expect("rp")
            return inner
        what = "end of input" if tok[0] == "eof" else repr(tok[1])
        raise ParseError(f"expected a term, found {what}", tok[2])

    out = term([])
    expect("eof")
    return out
