"""Bounded relational interpretation of terms and point sizes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .rewrite import DEFAULT_FUEL, normalize
from .search import Bounds, BudgetExceeded, DerivationSearch, universe
from .syntax import Term, free_vars, is_value, parse, print_term
from .transport import empty_type_derivation
from .typesys import (
    ZERO,
    app_node,
    ax,
    check_derivation,
    env_of,
    lam,
    singleton,
    size,
    type_of,
    type_to_json,
)

__all__ = [
    "Point",
    "Interpretation",
    "UnsuitableVars",
    "universe",
    "point_size",
    "point_of",
    "interpret_bounded",
    "interpret_direct",
    "has_empty_point",
    "counterexample_check",
]

DEFAULT_BUDGET = 20_000


class UnsuitableVars(ValueError):
    pass


@dataclass(frozen=True)
class Point:
    env_types: tuple
    result: object

    @property
    def size(self) -> int:
        return point_size(self)

    def to_json(self) -> dict:
        return {
            "env": [type_to_json(p) for p in self.env_types],
            "result": type_to_json(self.result),
            "size": self.size,
        }

    def sort_key(self):
        return (tuple(p.key for p in self.env_types), self.result.key)


def point_size(p: Point) -> int:
    """Arrow occurrences in the result plus those in every environment type."""
    return p.result.arrows + sum(q.arrows for q in p.env_types)


def point_of(d, vars) -> Point:
    env = env_of(d)
    return Point(tuple(env.get(x) for x in vars), type_of(d))


@dataclass
class Interpretation:
    term: Term
    vars: tuple
    depth: int
    width: int
    points: frozenset
    complete: bool
    witnesses: dict = field(default_factory=dict, repr=False)

    def to_json(self) -> dict:
        return {
            "term": print_term(self.term),
            "vars": list(self.vars),
            "depth": self.depth,
            "width": self.width,
            "complete": self.complete,
            "points": [p.to_json() for p in sorted(self.points, key=Point.sort_key)],
        }


def _suitable(t: Term, vars) -> tuple:
    vars = tuple(sorted(free_vars(t))) if vars is None else tuple(vars)
    if len(set(vars)) != len(vars):
        raise UnsuitableVars("variables repeat")
    missing = free_vars(t) - set(vars)
    if missing:
        raise UnsuitableVars(f"free variables not listed: {sorted(missing)}")
    return vars


def _collect(t: Term, vars: tuple, bounds: Bounds, budget) -> tuple:
    search = DerivationSearch(bounds, budget=budget)
    witnesses: dict = {}
    complete = True
    try:
        for d in search.derivations(t):
            witnesses.setdefault(point_of(d, vars), d)
    except BudgetExceeded:
        complete = False
    return witnesses, complete


def interpret_bounded(
    t: Term,
    vars=None,
    depth: int = 2,
    width: int = 2,
    fuel: int = DEFAULT_FUEL,
    budget: Optional[int] = DEFAULT_BUDGET,
) -> Interpretation:
    """Points of the normal form of ``t`` witnessed by bounded derivations.

    ``complete`` is false when the term did not normalize within ``fuel`` or
    the search hit ``budget`` before exhausting the bounded space.
    """
    vars = _suitable(t, vars)
    trace = normalize(t, "leftmost", True, fuel)
    if trace.normal_form is None:
        return Interpretation(t, vars, depth, width, frozenset(), False)
    witnesses, complete = _collect(trace.normal_form, vars, Bounds(depth, width), budget)
    return Interpretation(t, vars, depth, width, frozenset(witnesses), complete, witnesses)


def interpret_direct(t: Term, vars=None, depth: int = 2, width: int = 2, budget: Optional[int] = DEFAULT_BUDGET):
    """Bounded search on ``t`` itself, without normalizing first."""
    vars = _suitable(t, vars)
    witnesses, complete = _collect(t, vars, Bounds(depth, width), budget)
    return Interpretation(t, vars, depth, width, frozenset(witnesses), complete, witnesses)


def has_empty_point(t: Term, vars=None, fuel: int = DEFAULT_FUEL) -> Optional[bool]:
    """Whether the all-empty point belongs to the semantics; ``None`` if unknown."""
    _suitable(t, vars)
    trace = normalize(t, "leftmost", True, fuel)
    if trace.normal_form is None:
        return None
    found = empty_type_derivation(t, fuel) is not None
    assert found == is_value(trace.normal_form)
    return found


@dataclass(frozen=True)
class CounterexampleReport:
    term: Term
    derivation: object
    derivation_size: int
    point_size: int
    violations: tuple

    @property
    def pair(self) -> tuple:
        return (self.derivation_size, self.point_size)


def counterexample_check() -> CounterexampleReport:
    """A derivation whose size exceeds the size of its conclusion point.

    ``y:[0 -o 0] |- (\\x. x) (y y) : 0`` is derived with two application
    rules while the point ``([0 -o 0]), 0`` has a single arrow.
    """
    t = parse("(\\x. x) (y y)")
    y_fun = ax("y", singleton(ZERO, ZERO))
    y_arg = ax("y", ZERO)
    identity = lam(t.fun, "x", [ax("x", ZERO)])
    pi = app_node(identity, app_node(y_fun, y_arg))
    violations = tuple(check_derivation(pi))
    if violations:
        raise AssertionError(f"stored derivation does not check: {violations}")
    p = point_of(pi, ("y",))
    report = CounterexampleReport(t, pi, size(pi), point_size(p), violations)
    if report.pair != (2, 1):
        raise AssertionError(f"unexpected sizes {report.pair}")
    return report
