"""Moving derivations along reduction steps with exact size bookkeeping.

Every function here is constructive: it rebuilds a derivation for the new
subject from the pieces of the old one.  Balanced beta-v steps change the
size by exactly one, sigma steps leave it unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .rewrite import (
    DEFAULT_FUEL,
    Dir,
    Rule,
    Step,
    Trace,
    balanced_size,
    normalize,
    path_is_balanced,
    replace_at,
    root_step,
    subterm_at,
)
from .syntax import (
    Abs,
    App,
    Bound,
    Term,
    TermClass,
    Var,
    classify,
    fresh,
    free_vars,
    is_value,
    lam as close_lam,
    open_body,
    print_term,
)
from .typesys import (
    ZERO,
    AppNode,
    AxNode,
    LamNode,
    SubjectMismatch,
    TypingError,
    app_node,
    ax,
    env_of,
    lam,
    merge_value,
    rebind,
    rename_derivation,
    singleton,
    size,
    subject_of,
    substitute_derivation,
    type_of,
    zero_derivation,
)


class NotBalanced(TypingError):
    pass


class ShapeMismatch(TypingError):
    pass


class NotNormal(TypingError):
    pass


class TargetNotSupported(TypingError):
    pass


@dataclass(frozen=True)
class TransportReport:
    input_size: int
    output_size: int
    rule: Rule
    direction: str

    @property
    def delta(self) -> int:
        return self.output_size - self.input_size


@dataclass(frozen=True)
class CostVerdict:
    status: str
    len_bv: Optional[int] = None
    normal_form: Optional[Term] = None
    derivation_size: Optional[int] = None
    fuel_spent: int = 0

    @property
    def finite(self) -> bool:
        return self.status == "finite"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "len_bv": self.len_bv,
            "normal_form": None if self.normal_form is None else print_term(self.normal_form),
            "derivation_size": self.derivation_size,
        }


def _shape(cond: bool, what: str):
    if not cond:
        raise ShapeMismatch(what)


def _applied_lam(d, what: str) -> LamNode:
    _shape(isinstance(d, AppNode) and isinstance(d.left, LamNode) and len(d.left.premises) == 1, what)
    return d.left


def _avoiding(d: LamNode, avoid) -> LamNode:
    if d.binder in avoid:
        return rebind(d, fresh(set(avoid) | free_vars(subject_of(d)) | {d.binder}))
    return d


# ---------------------------------------------------------------- reduction


def _reduce_root(pi, rule: Rule):
    t = subject_of(pi)
    if rule is Rule.BETA_V:
        fn = _applied_lam(pi, "beta-v redex must be typed by an application of a one-premise lambda")
        return substitute_derivation(fn.premises[0], fn.binder, pi.right)
    if rule is Rule.SIGMA1:
        # ((\x.u) s) r  ->  (\x. u r) s
        _shape(isinstance(pi, AppNode), "sigma1 redex must be typed by an application")
        fn = _applied_lam(pi.left, "sigma1 redex must contain a typed beta-redex")
        r = subject_of(pi.right)
        fn = _avoiding(fn, free_vars(r))
        body = app_node(fn.premises[0], pi.right)
        new_lam = lam(close_lam(fn.binder, subject_of(body)), fn.binder, [body])
        return app_node(new_lam, pi.left.right)
    # v ((\x.u) s)  ->  (\x. v u) s
    _shape(isinstance(pi, AppNode), "sigma3 redex must be typed by an application")
    fn = _applied_lam(pi.right, "sigma3 redex must contain a typed beta-redex")
    fn = _avoiding(fn, free_vars(t.fun))
    body = app_node(pi.left, fn.premises[0])
    new_lam = lam(close_lam(fn.binder, subject_of(body)), fn.binder, [body])
    return app_node(new_lam, pi.right.right)


def _reduce_at(pi, path: tuple, rule: Rule):
    if not path:
        return _reduce_root(pi, rule)
    d, rest = path[0], path[1:]
    if d is Dir.FUN:
        _shape(isinstance(pi, AppNode), "path enters the function of a non-application")
        return app_node(_reduce_at(pi.left, rest, rule), pi.right)
    if d is Dir.ARG:
        _shape(isinstance(pi, AppNode), "path enters the argument of a non-application")
        return app_node(pi.left, _reduce_at(pi.right, rest, rule))
    _shape(isinstance(pi, LamNode), "path enters the body of a non-abstraction")
    t = subject_of(pi)
    new_body = _rewrite(t.body, rest, rule)
    premises = [_reduce_at(p, rest, rule) for p in pi.premises]
    return lam(Abs(new_body, t.hint), pi.binder, premises)


def _rewrite(t: Term, path: tuple, rule: Rule) -> Term:
    out = root_step(subterm_at(t, path), rule)
    if out is None:
        raise SubjectMismatch(f"no {rule.value} redex at the step position")
    return replace_at(t, path, out)


def subject_reduce(pi, step: Step, full: bool = False):
    """Derivation of ``step.after`` with the same environment and type.

    With ``full=True`` steps under unapplied abstractions are accepted and
    every premise of such an abstraction is transported.
    """
    if subject_of(pi) != step.before:
        raise SubjectMismatch("derivation does not type the source of the step")
    if not full and not path_is_balanced(step.position.path):
        raise NotBalanced("step is not inside a balanced context")
    out = _reduce_at(pi, step.position.path, step.rule)
    assert subject_of(out) == step.after
    return out, TransportReport(size(pi), size(out), step.rule, "forward")


# ---------------------------------------------------------------- expansion


def commute_abs_abs(pi, k: int):
    """``\\y.((\\x.t) v)`` to ``(\\x.\\y.t) v``; size changes by ``1 - k``."""
    _shape(isinstance(pi, LamNode), "expected a lambda node")
    _shape(len(pi.premises) == k, f"expected {k} premises, found {len(pi.premises)}")
    t = subject_of(pi)
    _shape(
        isinstance(t.body, App) and isinstance(t.body.fun, Abs) and 0 not in _loose(t.body.arg),
        "subject must be \\y.((\\x.t) v) with y not free in v",
    )
    inner_binders = set()
    for p in pi.premises:
        fn = _applied_lam(p, "each premise must type an applied one-premise lambda")
        inner_binders.add(fn.binder)
    avoid = free_vars(t) | {pi.binder} | inner_binders
    x = fresh(avoid)
    y = fresh(avoid | {x})
    redex = open_body(t.body, y)  # (\x.t_y) v
    v = redex.arg
    t_xy = open_body(redex.fun.body, x)
    inner_abs = close_lam(y, t_xy)
    bodies, args = [], []
    for p in pi.premises:
        fn = p.left
        # inner binder first: it may coincide with an unused outer one
        q = rename_derivation(fn.premises[0], fn.binder, x)
        q = rename_derivation(q, pi.binder, y)
        bodies.append(q)
        args.append(p.right)
    inner = lam(inner_abs, y, bodies)
    outer = lam(close_lam(x, inner_abs), x, [inner])
    return app_node(outer, merge_value(args, subject=v))


def _loose(t: Term, depth: int = 0) -> set:
    if isinstance(t, Bound):
        return {t.index - depth} if t.index >= depth else set()
    if isinstance(t, Var):
        return set()
    if isinstance(t, Abs):
        return _loose(t.body, depth + 1)
    return _loose(t.fun, depth) | _loose(t.arg, depth)


def commute_app_abs(pi):
    """``((\\x.t) v)((\\x.u) v)`` to ``(\\x. t u) v``; size drops by one."""
    _shape(isinstance(pi, AppNode), "expected an application node")
    f1 = _applied_lam(pi.left, "function must be a typed applied lambda")
    f2 = _applied_lam(pi.right, "argument must be a typed applied lambda")
    v1, v2 = subject_of(pi.left.right), subject_of(pi.right.right)
    _shape(v1 == v2, "both redexes must share the same argument")
    x = fresh(free_vars(subject_of(pi)) | {f1.binder, f2.binder})
    left = rename_derivation(f1.premises[0], f1.binder, x)
    right = rename_derivation(f2.premises[0], f2.binder, x)
    body = app_node(left, right)
    outer = lam(close_lam(x, subject_of(body)), x, [body])
    return app_node(outer, merge_value([pi.left.right, pi.right.right]))


def _expand_beta(x: str, u: Term, v: Term, pi):
    """Derivation of ``(\\x.u) v`` from one of ``u{v/x}``; one application more."""
    redex_fun = close_lam(x, u)
    if isinstance(u, Var) and u.name == x:
        return app_node(lam(redex_fun, x, [ax(x, type_of(pi))]), pi)
    if isinstance(u, Var):
        return app_node(lam(redex_fun, x, [pi]), zero_derivation(v))
    if isinstance(u, Abs):
        _shape(isinstance(pi, LamNode), "expected a lambda node for an abstraction")
        pi = _avoiding(pi, free_vars(v) | {x})
        y = pi.binder
        s_y = open_body(u.body, y)
        premises = [_expand_beta(x, s_y, v, p) for p in pi.premises]
        subject = close_lam(y, App(close_lam(x, s_y), v))
        return commute_abs_abs(lam(subject, y, premises), len(premises))
    _shape(isinstance(pi, AppNode), "expected an application node")
    left = _expand_beta(x, u.fun, v, pi.left)
    right = _expand_beta(x, u.arg, v, pi.right)
    return commute_app_abs(app_node(left, right))


def _expand_root(pi, before: Term, rule: Rule):
    if rule is Rule.BETA_V:
        x = fresh(free_vars(before))
        return _expand_beta(x, open_body(before.fun.body, x), before.arg, pi)
    if rule is Rule.SIGMA1:
        # (\x. u r) s  <-  ((\x.u) s) r
        fn = _applied_lam(pi, "sigma1 reduct must be typed by an applied one-premise lambda")
        body = fn.premises[0]
        _shape(isinstance(body, AppNode), "sigma1 reduct body must be an application")
        inner = lam(before.fun.fun, fn.binder, [body.left])
        return app_node(app_node(inner, pi.right), body.right)
    # (\x. v u) s  <-  v ((\x.u) s)
    fn = _applied_lam(pi, "sigma3 reduct must be typed by an applied one-premise lambda")
    body = fn.premises[0]
    _shape(isinstance(body, AppNode), "sigma3 reduct body must be an application")
    inner = lam(before.arg.fun, fn.binder, [body.right])
    return app_node(body.left, app_node(inner, pi.right))


def _expand_at(pi, before: Term, path: tuple, rule: Rule):
    if not path:
        return _expand_root(pi, before, rule)
    d, rest = path[0], path[1:]
    if d is Dir.FUN:
        _shape(isinstance(pi, AppNode), "path enters the function of a non-application")
        return app_node(_expand_at(pi.left, before.fun, rest, rule), pi.right)
    if d is Dir.ARG:
        _shape(isinstance(pi, AppNode), "path enters the argument of a non-application")
        return app_node(pi.left, _expand_at(pi.right, before.arg, rest, rule))
    _shape(isinstance(pi, LamNode), "path enters the body of a non-abstraction")
    pi = _avoiding(pi, free_vars(before))
    body = open_body(before.body, pi.binder)
    return lam(before, pi.binder, [_expand_at(p, body, rest, rule) for p in pi.premises])


def subject_expand(pi_after, step: Step, full: bool = False):
    """Derivation of ``step.before`` with the same environment and type."""
    if subject_of(pi_after) != step.after:
        raise SubjectMismatch("derivation does not type the target of the step")
    if not full and not path_is_balanced(step.position.path):
        raise NotBalanced("step is not inside a balanced context")
    out = _expand_at(pi_after, step.before, step.position.path, step.rule)
    assert subject_of(out) == step.before
    return out, TransportReport(size(pi_after), size(out), step.rule, "backward")


# ---------------------------------------------------------------- synthesis


def derive_normal(t: Term, vars=None, target=None):
    """A derivation of a balanced normal form, following its grammar.

    ``target`` fixes the result type and is only allowed for applicative
    normal forms.
    """
    cls = classify(t)
    if cls is TermClass.REDUCIBLE:
        raise NotNormal(f"{print_term(t)} is not a balanced normal form")
    if vars is not None and not free_vars(t) <= set(vars):
        raise ValueError("free variables of the term are not all listed")
    if target is not None and cls is not TermClass.APPLICATIVE_NORMAL:
        raise TargetNotSupported("a result type can only be chosen for applicative normal forms")
    return _derive(t, target)


def _derive(t: Term, target):
    if is_value(t):
        return zero_derivation(t)
    q = ZERO if target is None else target
    f, a = t.fun, t.arg
    if isinstance(f, Var):
        arg = zero_derivation(a) if is_value(a) else _derive(a, ZERO)
        return app_node(ax(f.name, singleton(ZERO, q)), arg)
    if isinstance(f, Abs):
        y = fresh(free_vars(f))
        body = _derive(open_body(f.body, y), None)
        fn = lam(f, y, [body])
        return app_node(fn, _derive(a, env_of(body).get(y)))
    arg = _derive(a, None)
    return app_node(_derive(f, singleton(type_of(arg), q)), arg)


def minimal_derivation_normal(t: Term):
    d = derive_normal(t)
    assert size(d) == balanced_size(t)
    return d


def pull_back(pi, trace: Trace):
    """Expand a derivation of the final term of ``trace`` back to its start."""
    for step in reversed(trace.steps):
        pi, _ = subject_expand(pi, step)
    return pi


def derive(t: Term, fuel: int = DEFAULT_FUEL):
    trace = normalize(t, "leftmost", True, fuel)
    if trace.normal_form is None:
        return None
    return pull_back(minimal_derivation_normal(trace.normal_form), trace), trace


def count_beta_steps(t: Term, fuel: int = DEFAULT_FUEL) -> CostVerdict:
    found = derive(t, fuel)
    if found is None:
        return CostVerdict("unknown", fuel_spent=fuel)
    pi, trace = found
    n = size(pi) - balanced_size(trace.normal_form)
    if n != trace.len_bv:
        raise AssertionError(f"size law broken on {print_term(t)}: {n} != {trace.len_bv}")
    return CostVerdict("finite", n, trace.normal_form, size(pi), len(trace.steps))


def empty_type_derivation(t: Term, fuel: int = DEFAULT_FUEL):
    """Derivation of ``|- t : 0`` when ``t`` normalizes to a value, else ``None``."""
    trace = normalize(t, "leftmost", True, fuel)
    if trace.normal_form is None or not is_value(trace.normal_form):
        return None
    return pull_back(zero_derivation(trace.normal_form), trace)


def check_empty_uniqueness(t: Term, depth: int = 2, width: int = 2) -> bool:
    from .search import Bounds, DerivationSearch

    if classify(t) is TermClass.REDUCIBLE:
        raise NotNormal(f"{print_term(t)} is not a balanced normal form")
    search = DerivationSearch(Bounds(depth, width), zero=free_vars(t))
    found = []
    for d in search.iter_derivations(t, ZERO):
        if not env_of(d).bindings:
            found.append(d)
        if len(found) > 1:
            return False
    if not found:
        return True
    (d,) = found
    if not is_value(t) or size(d) != 0:
        return False
    return isinstance(d, AxNode) or (isinstance(d, LamNode) and not d.premises)
