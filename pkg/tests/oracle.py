"""Named-variable reference reducer, independent of the package's engine.

Terms are tuples ``("var", x)``, ``("lam", x, body)``, ``("app", f, a)``.
"""

import itertools

from shufcalc.syntax import term_to_json


def from_term(t):
    def go(j):
        if j[0] == "var":
            return ("var", j[1])
        if j[0] == "lam":
            return ("lam", j[1], go(j[2]))
        return ("app", go(j[1]), go(j[2]))

    return go(term_to_json(t))


def fv(t):
    if t[0] == "var":
        return {t[1]}
    if t[0] == "lam":
        return fv(t[2]) - {t[1]}
    return fv(t[1]) | fv(t[2])


def names(t):
    if t[0] == "var":
        return {t[1]}
    if t[0] == "lam":
        return {t[1]} | names(t[2])
    return names(t[1]) | names(t[2])


_counter = itertools.count()


def fresh(avoid):
    while True:
        n = f"_v{next(_counter)}"
        if n not in avoid:
            return n


def subst(t, x, s):
    if t[0] == "var":
        return s if t[1] == x else t
    if t[0] == "app":
        return ("app", subst(t[1], x, s), subst(t[2], x, s))
    y, body = t[1], t[2]
    if y == x:
        return t
    if y in fv(s):
        z = fresh(fv(s) | names(body) | {x})
        body = subst(body, y, ("var", z))
        y = z
    return ("lam", y, subst(body, x, s))


def is_value(t):
    return t[0] != "app"


def root(t):
    """List of (rule, contractum) for root steps."""
    if t[0] != "app":
        return []
    f, a = t[1], t[2]
    out = []
    if f[0] == "lam" and is_value(a):
        out.append(("beta_v", subst(f[2], f[1], a)))
    if f[0] == "app" and f[1][0] == "lam":
        x, b, u = f[1][1], f[1][2], f[2]
        if x in fv(a):
            z = fresh(fv(a) | names(b))
            b, x = subst(b, x, ("var", z)), z
        out.append(("sigma1", ("app", ("lam", x, ("app", b, a)), u)))
    if is_value(f) and a[0] == "app" and a[1][0] == "lam":
        x, b, u = a[1][1], a[1][2], a[2]
        if x in fv(f):
            z = fresh(fv(f) | names(b))
            b, x = subst(b, x, ("var", z)), z
        out.append(("sigma3", ("app", ("lam", x, ("app", f, b)), u)))
    return out


def steps(t, balanced=True, applied=False):
    """All one-step reducts as (rule, result)."""
    out = list(root(t))
    if t[0] == "app":
        out += [(r, ("app", s, t[2])) for r, s in steps(t[1], balanced, True)]
        out += [(r, ("app", t[1], s)) for r, s in steps(t[2], balanced, False)]
    elif t[0] == "lam" and (applied or not balanced):
        out += [(r, ("lam", t[1], s)) for r, s in steps(t[2], balanced, False)]
    return out


def canon(t, env=()):
    """De Bruijn-style canonical form for alpha comparison."""
    if t[0] == "var":
        for i, x in enumerate(reversed(env)):
            if x == t[1]:
                return ("b", i)
        return ("f", t[1])
    if t[0] == "lam":
        return ("l", canon(t[2], env + (t[1],)))
    return ("a", canon(t[1], env), canon(t[2], env))


def normal_forms(t, fuel=40):
    """Map canonical normal form -> set of beta_v counts, over all balanced traces.

    Returns ``None`` when some trace exceeds ``fuel`` steps.
    """
    memo = {}

    def go(t, left):
        key = (canon(t), left)
        if key in memo:
            return memo[key]
        nxt = steps(t)
        if not nxt:
            res = {canon(t): {0}}
        elif left == 0:
            res = None
        else:
            res = {}
            for rule, s in nxt:
                sub = go(s, left - 1)
                if sub is None:
                    res = None
                    break
                for nf, counts in sub.items():
                    res.setdefault(nf, set()).update(c + (rule == "beta_v") for c in counts)
        memo[key] = res
        return res

    return go(t, fuel)


def size_balanced(t, applied=False):
    """Applications reachable through balanced contexts, counted directly."""
    if t[0] == "var":
        return 0
    if t[0] == "lam":
        return size_balanced(t[2]) if applied else 0
    return 1 + size_balanced(t[1], True) + size_balanced(t[2])
