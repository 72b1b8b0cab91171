"""Seeded random terms plus a fixed list of named fixtures."""

from __future__ import annotations

import random

from .syntax import Abs, App, Bound, Term, Var, node_count, parse

FREE_POOL = ("x", "y", "z")

_I = "(\\x. x)"
_D = "(\\x. x x)"

FIXTURES = {
    "I": _I,
    "delta": _D,
    "delta_delta": f"{_D} {_D}",
    "I_I": f"{_I} {_I}",
    "delta_I": f"{_D} {_I}",
    "stuck_loop_z_t": f"(\\y. {_D}) (z {_I}) {_D}",
    "stuck_loop_z_u": f"{_D} ((\\y. {_D}) (z {_I}))",
    "stuck_loop_x_t": f"(\\y. {_D}) (x {_I}) {_D}",
    "stuck_loop_x_u": f"{_D} ((\\y. {_D}) (x {_I}))",
    "critical_pair": f"(\\y. y') ({_D} (x {_I})) {_I}",
    "lambda_y_I_I": f"\\y. {_I} {_I}",
    "counterexample": "(\\x. x) (y y)",
    "balanced_size_3": "(\\x. y y') (z z')",
    "balanced_size_2": "(\\x. \\x'. y y') (z z')",
}


def fixtures() -> list:
    return [parse(text) for text in FIXTURES.values()]


class _Gen:
    def __init__(self, rng: random.Random, closed: bool):
        self.rng = rng
        self.closed = closed

    def var(self, depth: int) -> Term:
        choices = [Bound(i) for i in range(depth)]
        if not self.closed or not choices:
            if self.closed:
                return Abs(Bound(0))
            choices += [Var(x) for x in FREE_POOL]
        return self.rng.choice(choices)

    def value(self, n: int, depth: int) -> Term:
        if n <= 1:
            return self.var(depth)
        return Abs(self.term(n - 1, depth + 1))

    def term(self, n: int, depth: int) -> Term:
        if n <= 1:
            return self.var(depth)
        if n == 2 or self.rng.random() < 0.3:
            return Abs(self.term(n - 1, depth + 1))
        k = self.rng.randint(1, n - 2)
        return App(self.term(k, depth), self.term(n - 1 - k, depth))

    def applicative(self, n: int, depth: int) -> Term:
        # head variable applied to something
        if n < 3:
            return self.term(n, depth)
        return App(self.var(depth), self.term(n - 2, depth))

    def shaped(self, n: int) -> Term:
        kind = self.rng.random()
        if n < 5 or kind < 0.2:
            return self.value(n, 0) if self.rng.random() < 0.5 else self.term(n, 0)
        if kind < 0.4:
            # stuck beta-redex
            k = self.rng.randint(1, n - 4)
            return App(Abs(self.term(k, 1)), self.applicative(n - 2 - k, 0))
        if kind < 0.6:
            # sigma1 shape
            k = self.rng.randint(1, n - 4)
            j = self.rng.randint(1, n - 3 - k)
            return App(App(Abs(self.term(k, 1)), self.term(j, 0)), self.term(max(1, n - 3 - k - j), 0))
        if kind < 0.8:
            # sigma3 shape
            k = self.rng.randint(1, n - 4)
            j = self.rng.randint(1, n - 3 - k)
            return App(self.value(k, 0), App(Abs(self.term(j, 1)), self.term(max(1, n - 3 - k - j), 0)))
        return self.term(n, 0)


def random_term(rng: random.Random, max_size: int) -> Term:
    closed = rng.random() < 0.35
    gen = _Gen(rng, closed)
    while True:
        t = gen.shaped(rng.randint(1, max_size))
        if node_count(t) <= max_size:
            return t


def gen_corpus(seed: int, count: int, max_size: int = 12) -> list:
    """``count`` random terms of at most ``max_size`` nodes, then the fixtures."""
    rng = random.Random(seed)
    return [random_term(rng, max_size) for _ in range(count)] + fixtures()


def enumerate_terms(max_nodes: int, free=("x", "y")) -> list:
    """Every term (up to alpha) with at most ``max_nodes`` nodes over ``free``."""
    table: dict = {}

    def of_size(n: int, depth: int) -> list:
        key = (n, depth)
        if key in table:
            return table[key]
        out = []
        if n == 1:
            out = [Var(x) for x in free] + [Bound(i) for i in range(depth)]
        else:
            out = [Abs(b) for b in of_size(n - 1, depth + 1)]
            for k in range(1, n - 1):
                out += [App(f, a) for f in of_size(k, depth) for a in of_size(n - 1 - k, depth)]
        table[key] = out
        return out

    return [t for n in range(1, max_nodes + 1) for t in of_size(n, 0)]
