"""Non-idempotent intersection types, derivation trees and their checker.

A positive type is a multiset of arrows kept in a canonical sorted order, so
tuple equality is multiset equality.  Derivation nodes store their conclusion;
the smart constructors ``ax``, ``lam`` and ``app_node`` compute it from the
premises.  A lambda node opens its abstraction with the free name ``binder``,
which must not occur free in the abstraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .syntax import (
    Abs,
    App,
    Term,
    Var,
    fresh,
    free_vars,
    is_value,
    open_body,
    parse,
    print_term,
    rename_free,
    subst,
)


class TypingError(ValueError):
    pass


class TypeMismatch(TypingError):
    pass


class BadPartition(TypingError):
    pass


class NotAValue(TypingError):
    pass


class SubjectMismatch(TypingError):
    pass


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class NegativeType:
    arg: "PositiveType"
    res: "PositiveType"
    key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        # cardinalities first, then structure
        object.__setattr__(self, "key", (len(self.arg), len(self.res), self.arg.key, self.res.key))

    def __lt__(self, other: "NegativeType") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return f"{self.arg} -o {self.res}"


@dataclass(frozen=True)
class PositiveType:
    elems: tuple = ()
    key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        elems = tuple(sorted(self.elems, key=lambda n: n.key))
        object.__setattr__(self, "elems", elems)
        object.__setattr__(self, "key", (len(elems), tuple(n.key for n in elems)))

    def __add__(self, other: "PositiveType") -> "PositiveType":
        if not other.elems:
            return self
        if not self.elems:
            return other
        return PositiveType(self.elems + other.elems)

    def __lt__(self, other: "PositiveType") -> bool:
        return self.key < other.key

    def __len__(self) -> int:
        return len(self.elems)

    def __bool__(self) -> bool:
        return bool(self.elems)

    def __str__(self) -> str:
        if not self.elems:
            return "0"
        return "[" + ", ".join(str(n) for n in self.elems) + "]"

    @property
    def arrows(self) -> int:
        """Number of arrow occurrences."""
        return sum(1 + n.arg.arrows + n.res.arrows for n in self.elems)


ZERO = PositiveType()


def arrow(arg: PositiveType, res: PositiveType) -> NegativeType:
    return NegativeType(arg, res)


def multiset(*arrows: NegativeType) -> PositiveType:
    return PositiveType(tuple(arrows))


def singleton(arg: PositiveType, res: PositiveType) -> PositiveType:
    return PositiveType((NegativeType(arg, res),))


def type_sum(types: Iterable[PositiveType]) -> PositiveType:
    elems = []
    for p in types:
        elems.extend(p.elems)
    return PositiveType(tuple(elems))


def type_to_json(p: PositiveType) -> list:
    return [["arrow", type_to_json(n.arg), type_to_json(n.res)] for n in p.elems]


def type_from_json(data) -> PositiveType:
    if not isinstance(data, list):
        raise TypingError(f"positive type must be a list, got {data!r}")
    elems = []
    for item in data:
        if not (isinstance(item, list) and len(item) == 3 and item[0] == "arrow"):
            raise TypingError(f"malformed arrow {item!r}")
        elems.append(NegativeType(type_from_json(item[1]), type_from_json(item[2])))
    return PositiveType(tuple(elems))


# ---------------------------------------------------------------- environments


@dataclass(frozen=True)
class TypeEnv:
    bindings: tuple = ()

    @classmethod
    def of(cls, mapping) -> "TypeEnv":
        items = mapping.items() if hasattr(mapping, "items") else mapping
        return cls(tuple(sorted((x, p) for x, p in items if p.elems)))

    def get(self, x: str) -> PositiveType:
        for name, p in self.bindings:
            if name == x:
                return p
        return ZERO

    def names(self) -> tuple:
        return tuple(name for name, _ in self.bindings)

    def __add__(self, other: "TypeEnv") -> "TypeEnv":
        if not other.bindings:
            return self
        if not self.bindings:
            return other
        merged = dict(self.bindings)
        for x, p in other.bindings:
            merged[x] = merged[x] + p if x in merged else p
        return TypeEnv.of(merged)

    def without(self, x: str) -> "TypeEnv":
        return TypeEnv(tuple(b for b in self.bindings if b[0] != x))

    def restrict(self, names) -> "TypeEnv":
        return TypeEnv(tuple(b for b in self.bindings if b[0] in names))

    def rename(self, old: str, new: str) -> "TypeEnv":
        return TypeEnv.of({(new if x == old else x): p for x, p in self.bindings})

    def __str__(self) -> str:
        return ", ".join(f"{x}:{p}" for x, p in self.bindings)


EMPTY_ENV = TypeEnv()


def env_sum(g1: TypeEnv, g2: TypeEnv) -> TypeEnv:
    return g1 + g2


def env_single(x: str, p: PositiveType) -> TypeEnv:
    return TypeEnv(((x, p),)) if p.elems else EMPTY_ENV


# ---------------------------------------------------------------- derivations


@dataclass(frozen=True)
class Judgment:
    env: TypeEnv
    subject: Term
    ty: PositiveType

    def __str__(self) -> str:
        return f"{self.env} |- {print_term(self.subject)} : {self.ty}"


@dataclass(frozen=True)
class AxNode:
    conclusion: Judgment

    rule = "ax"
    premises = ()


@dataclass(frozen=True)
class LamNode:
    conclusion: Judgment
    binder: str
    premises: tuple

    rule = "lam"


@dataclass(frozen=True)
class AppNode:
    conclusion: Judgment
    left: "Derivation"
    right: "Derivation"

    rule = "app"

    @property
    def premises(self) -> tuple:
        return (self.left, self.right)


Derivation = (AxNode, LamNode, AppNode)


def env_of(d) -> TypeEnv:
    return d.conclusion.env


def subject_of(d) -> Term:
    return d.conclusion.subject


def type_of(d) -> PositiveType:
    return d.conclusion.ty


def ax(x: str, p: PositiveType) -> AxNode:
    return AxNode(Judgment(env_single(x, p), Var(x), p))


def lam(subject: Abs, binder: str, premises) -> LamNode:
    premises = tuple(premises)
    env = EMPTY_ENV
    arrows = []
    for p in premises:
        env = env + env_of(p).without(binder)
        arrows.append(NegativeType(env_of(p).get(binder), type_of(p)))
    return LamNode(Judgment(env, subject, PositiveType(tuple(arrows))), binder, premises)


def app_node(left, right) -> AppNode:
    fun_ty = type_of(left)
    if len(fun_ty.elems) != 1:
        raise TypeMismatch(f"function type {fun_ty} is not a single arrow")
    (arr,) = fun_ty.elems
    if arr.arg != type_of(right):
        raise TypeMismatch(f"argument has type {type_of(right)}, expected {arr.arg}")
    subject = App(subject_of(left), subject_of(right))
    return AppNode(Judgment(env_of(left) + env_of(right), subject, arr.res), left, right)


def zero_derivation(v: Term):
    """The size-0 derivation of ``|- v : 0`` for a value ``v``."""
    if isinstance(v, Var):
        return ax(v.name, ZERO)
    if isinstance(v, Abs):
        return lam(v, fresh(free_vars(v)), ())
    raise NotAValue(f"{print_term(v)} is not a value")


def size(d) -> int:
    """Number of application rules."""
    total = 0
    stack = [d]
    while stack:
        node = stack.pop()
        if isinstance(node, AppNode):
            total += 1
        stack.extend(node.premises)
    return total


@dataclass(frozen=True)
class RuleViolation:
    path: tuple
    reason: str

    def __str__(self) -> str:
        return f"at {list(self.path)}: {self.reason}"


def check_derivation(d) -> list:
    """All rule violations, each tagged with the premise-index path of its node."""
    out: list = []

    def check(node, path: tuple):
        if not isinstance(node, Derivation):
            out.append(RuleViolation(path, f"not a derivation node: {node!r}"))
            return
        c = node.conclusion
        t = c.subject
        if isinstance(node, AxNode):
            if not isinstance(t, Var):
                out.append(RuleViolation(path, "ax subject is not a variable"))
            elif c.env != env_single(t.name, c.ty):
                out.append(RuleViolation(path, f"ax environment must be {t.name}:{c.ty} only"))
            return
        for i, p in enumerate(node.premises):
            check(p, path + (i,))
        if isinstance(node, LamNode):
            if not isinstance(t, Abs):
                out.append(RuleViolation(path, "lam subject is not an abstraction"))
                return
            if node.binder in free_vars(t):
                out.append(RuleViolation(path, f"binder {node.binder} occurs free in the subject"))
                return
            body = open_body(t.body, node.binder)
            for i, p in enumerate(node.premises):
                if subject_of(p) != body:
                    out.append(RuleViolation(path + (i,), "premise subject is not the opened body"))
            expected = lam(t, node.binder, node.premises).conclusion
            if expected.ty != c.ty:
                out.append(RuleViolation(path, f"binder type mismatch: expected {expected.ty}, found {c.ty}"))
            if expected.env != c.env:
                out.append(RuleViolation(path, f"wrong environment sum: expected {expected.env}, found {c.env}"))
            return
        if not isinstance(t, App):
            out.append(RuleViolation(path, "app subject is not an application"))
            return
        left, right = node.left, node.right
        if subject_of(left) != t.fun or subject_of(right) != t.arg:
            out.append(RuleViolation(path, "premise subjects do not match the application"))
        fun_ty = type_of(left)
        if len(fun_ty.elems) != 1:
            out.append(RuleViolation(path, f"non-singleton arrow {fun_ty} on the function"))
            return
        (arr,) = fun_ty.elems
        if arr.arg != type_of(right):
            out.append(RuleViolation(path, f"argument type {type_of(right)} differs from {arr.arg}"))
        if arr.res != c.ty:
            out.append(RuleViolation(path, f"result type {c.ty} differs from {arr.res}"))
        if env_of(left) + env_of(right) != c.env:
            out.append(RuleViolation(path, "wrong environment sum"))

    check(d, ())
    return out


# ---------------------------------------------------------------- renaming


def rename_derivation(d, old: str, new: str):
    """Rename the free variable ``old`` to ``new`` throughout ``d``.

    ``new`` must not be free in the subject of ``d``.
    """
    subj = subject_of(d)
    if old == new or old not in free_vars(subj):
        return d
    if new in free_vars(subj):
        raise ValueError(f"{new} already occurs free in {print_term(subj)}")
    if isinstance(d, AxNode):
        return ax(new, type_of(d))
    if isinstance(d, AppNode):
        return app_node(rename_derivation(d.left, old, new), rename_derivation(d.right, old, new))
    binder, premises = d.binder, d.premises
    if binder == new:
        binder = fresh(free_vars(subj) | {old, new})
        premises = [rename_derivation(p, d.binder, binder) for p in premises]
    return lam(
        rename_free(subj, old, new),
        binder,
        [rename_derivation(p, old, new) for p in premises],
    )


def rebind(d: LamNode, binder: str) -> LamNode:
    """Same lambda node, opened with a different (fresh) binder name."""
    if binder == d.binder:
        return d
    if binder in free_vars(subject_of(d)):
        raise ValueError(f"{binder} occurs free in the abstraction")
    return lam(subject_of(d), binder, [rename_derivation(p, d.binder, binder) for p in d.premises])


# ---------------------------------------------------------------- values


def decompose_value(d, parts) -> list:
    """Split a derivation of a value along a multiset partition of its type."""
    parts = list(parts)
    v = subject_of(d)
    if not is_value(v):
        raise NotAValue(f"{print_term(v)} is not a value")
    if type_sum(parts) != type_of(d):
        raise BadPartition(f"parts do not sum to {type_of(d)}")
    if isinstance(d, AxNode):
        return [ax(v.name, p) for p in parts]
    pool = [(i, NegativeType(env_of(p).get(d.binder), type_of(p))) for i, p in enumerate(d.premises)]
    used = set()
    out = []
    for part in parts:
        chosen = []
        for n in part.elems:
            i = next(i for i, m in pool if i not in used and m == n)
            used.add(i)
            chosen.append(i)
        out.append(lam(v, d.binder, [d.premises[i] for i in sorted(chosen)]))
    return out


def merge_value(parts, subject: Optional[Term] = None):
    """Inverse of ``decompose_value``; ``subject`` is needed when ``parts`` is empty."""
    parts = list(parts)
    if not parts:
        if subject is None:
            raise SubjectMismatch("no parts and no subject given")
        return zero_derivation(subject)
    v = subject_of(parts[0])
    if subject is not None and subject != v:
        raise SubjectMismatch("parts do not type the given subject")
    if any(subject_of(p) != v for p in parts):
        raise SubjectMismatch("parts type different terms")
    if not is_value(v):
        raise NotAValue(f"{print_term(v)} is not a value")
    if isinstance(v, Var):
        return ax(v.name, type_sum(type_of(p) for p in parts))
    binder = parts[0].binder
    premises = []
    for p in parts:
        premises.extend(rebind(p, binder).premises)
    return lam(v, binder, premises)


def substitute_derivation(pi, x: str, piv):
    """From ``G, x:P |- t : Q`` and ``D |- v : P`` build ``G + D |- t{v/x} : Q``.

    The result has size ``size(pi) + size(piv)``.
    """
    if type_of(piv) != env_of(pi).get(x):
        raise TypeMismatch(f"substituend has type {type_of(piv)}, variable has {env_of(pi).get(x)}")
    v = subject_of(piv)
    if not is_value(v):
        raise NotAValue(f"{print_term(v)} is not a value")
    fv_v = free_vars(v)

    def go(pi, piv):
        t = subject_of(pi)
        if x not in free_vars(t):
            # piv types v with 0, so it is a size-0 derivation with empty environment
            return pi
        if isinstance(pi, AxNode):
            return piv
        if isinstance(pi, AppNode):
            a, b = decompose_value(piv, [env_of(pi.left).get(x), env_of(pi.right).get(x)])
            return app_node(go(pi.left, a), go(pi.right, b))
        if pi.binder == x or pi.binder in fv_v:
            pi = rebind(pi, fresh(free_vars(t) | fv_v | {x, pi.binder}))
        pieces = decompose_value(piv, [env_of(p).get(x) for p in pi.premises])
        return lam(subst(t, x, v), pi.binder, [go(p, q) for p, q in zip(pi.premises, pieces)])

    return go(pi, piv)


# ---------------------------------------------------------------- serialization


def derivation_to_json(d) -> dict:
    c = d.conclusion
    out = {
        "rule": d.rule,
        "env": {x: type_to_json(p) for x, p in c.env.bindings},
        "term": print_term(c.subject),
        "type": type_to_json(c.ty),
        "premises": [derivation_to_json(p) for p in d.premises],
    }
    if isinstance(d, LamNode):
        out["binder"] = d.binder
    return out


def derivation_from_json(data):
    """Rebuild a derivation exactly as stored; validity is left to the checker."""
    try:
        rule = data["rule"]
        env = TypeEnv.of({x: type_from_json(p) for x, p in data.get("env", {}).items()})
        conclusion = Judgment(env, parse(data["term"]), type_from_json(data["type"]))
        premises = tuple(derivation_from_json(p) for p in data.get("premises", []))
    except (KeyError, TypeError, AttributeError) as exc:
        raise TypingError(f"malformed derivation: {exc}") from exc
    if rule == "ax":
        return AxNode(conclusion)
    if rule == "app":
        if len(premises) != 2:
            raise TypingError("app node needs exactly two premises")
        return AppNode(conclusion, *premises)
    if rule == "lam":
        binder = data.get("binder") or _infer_binder(conclusion.subject, premises)
        return LamNode(conclusion, binder, premises)
    raise TypingError(f"unknown rule {rule!r}")


def _infer_binder(subject: Term, premises) -> str:
    outer = free_vars(subject)
    for p in premises:
        extra = free_vars(subject_of(p)) - outer
        if len(extra) == 1:
            return next(iter(extra))
    return fresh(outer)


def show_derivation(d, indent: int = 0) -> str:
    lines = ["  " * indent + f"{d.rule}: {d.conclusion}"]
    for p in d.premises:
        lines.append(show_derivation(p, indent + 1))
    return "\n".join(lines)
