"""Bounded, syntax-directed enumeration of type derivations.

Types that the rules leave open are drawn from a finite space: the type of
the whole judgment and the argument type of an application whose function is
not an abstraction.  Every other type is forced by the rules.  For a fixed
depth and width the search is therefore finite for any term.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations_with_replacement, product
from typing import Iterator

from .syntax import Abs, App, Term, Var, fresh, free_vars, open_body
from .typesys import (
    ZERO,
    NegativeType,
    PositiveType,
    app_node,
    ax,
    env_of,
    lam,
    singleton,
)


class BudgetExceeded(RuntimeError):
    pass


def multisets(pool, width: int) -> list:
    """All multisets over ``pool`` of cardinality at most ``width``, canonically ordered."""
    pool = sorted(pool, key=lambda n: n.key)
    out = []
    for k in range(width + 1):
        out.extend(PositiveType(c) for c in combinations_with_replacement(pool, k))
    return sorted(out, key=lambda p: p.key)


def universe(depth: int, width: int) -> frozenset:
    """Arrow types of nesting depth at most ``depth`` built from multisets of width at most ``width``."""
    level: frozenset = frozenset()
    for _ in range(depth):
        sides = multisets(level, width)
        level = frozenset(NegativeType(p, q) for p in sides for q in sides)
    return level


@dataclass(frozen=True)
class Bounds:
    depth: int = 2
    width: int = 2

    @cached_property
    def space(self) -> list:
        return multisets(universe(self.depth, self.width), self.width)


class DerivationSearch:
    """Lazy enumeration of bounded derivations.

    Names in ``zero`` must receive the empty type in every environment.
    ``budget`` caps the number of nodes built; exceeding it raises
    ``BudgetExceeded``.
    """

    def __init__(self, bounds: Bounds, zero=frozenset(), budget=None):
        self.bounds = bounds
        self.zero = frozenset(zero)
        self.budget = budget
        self.built = 0

    def _tick(self):
        self.built += 1
        if self.budget is not None and self.built > self.budget:
            raise BudgetExceeded(f"more than {self.budget} derivation nodes")

    def iter_derivations(self, t: Term, ty: PositiveType) -> Iterator:
        if isinstance(t, Var):
            if t.name in self.zero and ty.elems:
                return
            self._tick()
            yield ax(t.name, ty)
        elif isinstance(t, Abs):
            yield from self._abstraction(t, ty)
        elif isinstance(t.fun, Abs):
            f = t.fun
            b = fresh(free_vars(f) | self.zero)
            for body in self.iter_derivations(open_body(f.body, b), ty):
                fn = lam(f, b, [body])
                for arg in self.iter_derivations(t.arg, env_of(body).get(b)):
                    self._tick()
                    yield app_node(fn, arg)
        else:
            for p in self.bounds.space:
                args = list(self.iter_derivations(t.arg, p))
                if not args:
                    continue
                for fn in self.iter_derivations(t.fun, singleton(p, ty)):
                    for arg in args:
                        self._tick()
                        yield app_node(fn, arg)

    def _abstraction(self, t: Abs, ty: PositiveType) -> Iterator:
        b = fresh(free_vars(t) | self.zero)
        body = open_body(t.body, b)
        groups = []
        for n in ty.elems:
            if groups and groups[-1][0] == n:
                groups[-1][1] += 1
            else:
                groups.append([n, 1])
        choices = []
        for n, count in groups:
            options = [d for d in self.iter_derivations(body, n.res) if env_of(d).get(b) == n.arg]
            if not options:
                return
            choices.append([[options[i] for i in idx] for idx in combinations_with_replacement(range(len(options)), count)])
        for picks in product(*choices):
            self._tick()
            yield lam(t, b, [d for group in picks for d in group])

    def derivations(self, t: Term) -> Iterator:
        """All bounded derivations of ``t``, for every result type in the space."""
        for ty in self.bounds.space:
            yield from self.iter_derivations(t, ty)


class MinSizeOracle:
    """Minimum derivation size over the bounded space, by dynamic programming.

    Types of the names in ``free`` are left unconstrained and untracked;
    results are keyed by the environment restricted to the remaining
    (locally bound) names.  One oracle can be queried for many terms whose
    free variables lie in ``free``, sharing the memo table.
    """

    def __init__(self, bounds: Bounds, free):
        self.bounds = bounds
        self.ignored = frozenset(free)
        self.arrows = universe(bounds.depth, bounds.width)
        self.memo: dict = {}

    def _insensitive(self, t: Term) -> bool:
        # the result does not depend on the requested type
        if isinstance(t, Var):
            return t.name in self.ignored
        return isinstance(t, App) and not isinstance(t.fun, Abs) and self._insensitive(t.fun)

    def _fits(self, p: PositiveType) -> bool:
        return len(p) <= self.bounds.width and all(n in self.arrows for n in p.elems)

    def best(self, t: Term, ty: PositiveType, boxed=frozenset()) -> dict:
        """Map from tracked environment (as binding tuple) to minimum size.

        Names in ``boxed`` are bound by unapplied abstractions, so their
        types must end up inside the bounded space; entries that already
        overflow it are dropped.
        """
        boxed = boxed & free_vars(t)
        key = (t, None if self._insensitive(t) else ty, boxed)
        if key in self.memo:
            return self.memo[key]
        out: dict = {}

        def offer(env_key, n):
            if any(x in boxed and not self._fits(p) for x, p in env_key):
                return
            if n < out.get(env_key, n + 1):
                out[env_key] = n

        if isinstance(t, Var):
            offer(() if t.name in self.ignored else ((t.name, ty),) if ty.elems else (), 0)
        elif isinstance(t, Abs):
            b = fresh(free_vars(t) | self.ignored)
            body = open_body(t.body, b)
            partial = {(): 0}
            for n in ty.elems:
                options = {}
                for k, s in self.best(body, n.res, boxed | {b}).items():
                    env = dict(k)
                    if env.get(b, ZERO) == n.arg:
                        env.pop(b, None)
                        kk = tuple(sorted(env.items()))
                        options[kk] = min(s, options.get(kk, s))
                partial = _combine(partial, options)
                if not partial:
                    break
            for k, s in partial.items():
                offer(k, s)
        elif isinstance(t.fun, Abs):
            f = t.fun
            b = fresh(free_vars(f) | self.ignored)
            for k, s in self.best(open_body(f.body, b), ty, boxed).items():
                env = dict(k)
                p = env.pop(b, ZERO)
                rest = {tuple(sorted(env.items())): s}
                for kk, ss in _combine(rest, self.best(t.arg, p, boxed)).items():
                    offer(kk, ss + 1)
        else:
            for p in self.bounds.space:
                args = self.best(t.arg, p, boxed)
                if not args:
                    continue
                for kk, ss in _combine(self.best(t.fun, singleton(p, ty), boxed), args).items():
                    offer(kk, ss + 1)
        self.memo[key] = out
        return out

    def minimum(self, t: Term):
        """Smallest size of any bounded derivation of ``t``, or ``None``."""
        if not free_vars(t) <= self.ignored:
            raise ValueError("term has free variables outside the oracle's set")
        sizes = [s for ty in self.bounds.space for k, s in self.best(t, ty).items() if not k]
        return min(sizes) if sizes else None


def _combine(left: dict, right: dict) -> dict:
    out: dict = {}
    for k1, s1 in left.items():
        for k2, s2 in right.items():
            merged = dict(k1)
            for x, p in k2:
                merged[x] = merged[x] + p if x in merged else p
            k = tuple(sorted(merged.items()))
            s = s1 + s2
            if s < out.get(k, s + 1):
                out[k] = s
    return out
