"""Root steps, redex positions, strategies and traces."""

from __future__ import annotations

import enum
import random
import sys
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Optional

from .syntax import (
    Abs,
    App,
    Term,
    instantiate,
    is_value,
    node_count,
    print_term,
    shift,
)

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))

DEFAULT_FUEL = 10_000
# Terms growing past this many nodes are reported as fuel exhaustion.
MAX_TERM_NODES = 4_000


class InvalidRedex(ValueError):
    pass


class Rule(enum.Enum):
    BETA_V = "beta_v"
    SIGMA1 = "sigma1"
    SIGMA3 = "sigma3"

    @property
    def is_sigma(self) -> bool:
        return self is not Rule.BETA_V


SIGMA_RULES = frozenset((Rule.SIGMA1, Rule.SIGMA3))
ALL_RULES = frozenset(Rule)


class Dir(enum.Enum):
    FUN = "fun"
    ARG = "arg"
    BODY = "body"


def path_is_balanced(path) -> bool:
    prev = None
    for d in path:
        if d is Dir.BODY and prev is not Dir.FUN:
            return False
        prev = d
    return True


@dataclass(frozen=True)
class Position:
    path: tuple = ()
    balanced: bool = True

    @classmethod
    def of(cls, path) -> "Position":
        path = tuple(path)
        return cls(path, path_is_balanced(path))

    def to_json(self) -> list:
        return [d.value for d in self.path]


ROOT = Position()


@dataclass(frozen=True)
class Step:
    position: Position
    rule: Rule
    before: Term
    after: Term

    def to_json(self) -> dict:
        return {"pos": self.position.to_json(), "rule": self.rule.value, "term": print_term(self.after)}


@dataclass(frozen=True)
class Trace:
    start: Term
    steps: tuple
    normal_form: Optional[Term]

    @property
    def len_bv(self) -> int:
        return sum(1 for s in self.steps if s.rule is Rule.BETA_V)

    @property
    def len_sigma(self) -> int:
        return sum(1 for s in self.steps if s.rule.is_sigma)

    @property
    def outcome(self) -> str:
        return "fuel" if self.normal_form is None else "normal"

    @property
    def final(self) -> Term:
        return self.steps[-1].after if self.steps else self.start

    def to_json(self) -> dict:
        return {
            "start": print_term(self.start),
            "steps": [s.to_json() for s in self.steps],
            "len_bv": self.len_bv,
            "len_sigma": self.len_sigma,
            "outcome": self.outcome,
        }


# ---------------------------------------------------------------- root steps


def root_rule(t: Term) -> Optional[Rule]:
    """The unique rule whose left-hand side matches ``t`` at the root, if any."""
    if not isinstance(t, App):
        return None
    f, a = t.fun, t.arg
    if isinstance(f, Abs) and is_value(a):
        return Rule.BETA_V
    if isinstance(f, App) and isinstance(f.fun, Abs):
        return Rule.SIGMA1
    if is_value(f) and isinstance(a, App) and isinstance(a.fun, Abs):
        return Rule.SIGMA3
    return None


def root_step(t: Term, rule: Rule) -> Optional[Term]:
    if root_rule(t) is not rule:
        return None
    if rule is Rule.BETA_V:
        assert is_value(t.arg)
        return instantiate(t.fun.body, t.arg)
    if rule is Rule.SIGMA1:
        (lam_, u), s = (t.fun.fun, t.fun.arg), t.arg
        return App(Abs(App(lam_.body, shift(s, 1)), lam_.hint), u)
    v, lam_, u = t.fun, t.arg.fun, t.arg.arg
    return App(Abs(App(shift(v, 1), lam_.body), lam_.hint), u)


# ---------------------------------------------------------------- positions


def iter_redexes(t: Term, balanced: bool = True, rules=ALL_RULES) -> Iterator[tuple]:
    """Yield ``(path, rule)`` in leftmost-outermost order."""

    def go(t: Term, path: tuple, applied: bool):
        rule = root_rule(t)
        if rule is not None and rule in rules:
            yield path, rule
        if isinstance(t, App):
            yield from go(t.fun, path + (Dir.FUN,), True)
            yield from go(t.arg, path + (Dir.ARG,), False)
        elif isinstance(t, Abs) and (applied or not balanced):
            yield from go(t.body, path + (Dir.BODY,), False)

    yield from go(t, (), False)


def redexes(t: Term, balanced: bool = True, rules=ALL_RULES) -> list:
    return [(Position.of(p), r) for p, r in iter_redexes(t, balanced, rules)]


def subterm_at(t: Term, path) -> Term:
    for d in path:
        if d is Dir.FUN and isinstance(t, App):
            t = t.fun
        elif d is Dir.ARG and isinstance(t, App):
            t = t.arg
        elif d is Dir.BODY and isinstance(t, Abs):
            t = t.body
        else:
            raise InvalidRedex(f"path {[x.value for x in path]} leaves the term")
    return t


def replace_at(t: Term, path, new: Term) -> Term:
    if not path:
        return new
    d, rest = path[0], path[1:]
    if d is Dir.FUN:
        return App(replace_at(t.fun, rest, new), t.arg)
    if d is Dir.ARG:
        return App(t.fun, replace_at(t.arg, rest, new))
    return Abs(replace_at(t.body, rest, new), t.hint)


def apply_step(t: Term, pos: Position, rule: Rule) -> Step:
    if pos.balanced and not path_is_balanced(pos.path):
        raise InvalidRedex("position is not inside a balanced context")
    sub = subterm_at(t, pos.path)
    out = root_step(sub, rule)
    if out is None:
        raise InvalidRedex(f"no {rule.value} redex at {pos.to_json()}")
    return Step(pos, rule, t, replace_at(t, pos.path, out))


def _fire(t: Term, path: tuple, rule: Rule) -> Step:
    sub = subterm_at(t, path)
    return Step(Position.of(path), rule, t, replace_at(t, path, root_step(sub, rule)))


# ---------------------------------------------------------------- strategies


def normalize(
    t: Term,
    strategy: str = "leftmost",
    balanced: bool = True,
    fuel: int = DEFAULT_FUEL,
    seed: Optional[int] = None,
    rules=ALL_RULES,
    max_nodes: int = MAX_TERM_NODES,
) -> Trace:
    if strategy not in ("leftmost", "random"):
        raise ValueError(f"unknown strategy {strategy!r}")
    rng = random.Random(seed)
    steps = []
    cur = t
    while True:
        if strategy == "leftmost":
            found = next(iter_redexes(cur, balanced, rules), None)
        else:
            options = list(iter_redexes(cur, balanced, rules))
            found = rng.choice(options) if options else None
        if found is None:
            return Trace(t, tuple(steps), cur)
        if len(steps) >= fuel or node_count(cur) > max_nodes:
            return Trace(t, tuple(steps), None)
        step = _fire(cur, *found)
        steps.append(step)
        cur = step.after


def all_maximal_traces(t: Term, fuel: int = 1_000, cap: int = 256, balanced: bool = True) -> list:
    """Every maximal reduction sequence from ``t`` (at most ``cap`` of them).

    Suffixes are shared between alpha-equal states reached with the same
    remaining fuel.
    """
    memo: dict = {}

    def suffixes(state: Term, left: int) -> list:
        key = (state, left)
        if key in memo:
            return memo[key]
        found = list(iter_redexes(state, balanced))
        if not found:
            out = [((), state)]
        elif left == 0:
            out = [((), None)]
        else:
            out = []
            for path, rule in found:
                step = _fire(state, path, rule)
                for rest, nf in suffixes(step.after, left - 1):
                    out.append(((step,) + rest, nf))
                    if len(out) >= cap:
                        break
                if len(out) >= cap:
                    break
        memo[key] = out
        return out

    return [Trace(t, steps, nf) for steps, nf in suffixes(t, fuel)]


def balanced_size(t: Term) -> int:
    """Number of application nodes reachable through balanced contexts."""
    if not isinstance(t, App):
        return 0
    head = balanced_size(t.fun.body) if isinstance(t.fun, Abs) else balanced_size(t.fun)
    return head + balanced_size(t.arg) + 1


def reachable(t: Term, fuel: int, balanced: bool = True, rules=ALL_RULES) -> dict:
    """Breadth-first map from each reduct to its distance, up to ``fuel`` steps."""
    dist = {t: 0}
    queue = deque([t])
    while queue:
        cur = queue.popleft()
        if dist[cur] >= fuel:
            continue
        for path, rule in iter_redexes(cur, balanced, rules):
            nxt = _fire(cur, path, rule).after
            if nxt not in dist:
                dist[nxt] = dist[cur] + 1
                queue.append(nxt)
    return dist


def join(t: Term, u1: Term, u2: Term, fuel: int = 50, balanced: bool = True, rules=ALL_RULES) -> Optional[Term]:
    """A common reduct of ``u1`` and ``u2`` minimising the summed distance."""
    if u1 == u2:
        return u1
    left = reachable(u1, fuel, balanced, rules)
    right = reachable(u2, fuel, balanced, rules)
    common = [s for s in left if s in right]
    if not common:
        return None
    return min(common, key=lambda s: (left[s] + right[s], print_term(s)))
