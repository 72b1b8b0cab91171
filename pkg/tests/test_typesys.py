import json

import pytest
from hypothesis import given, strategies as st

from strategies import terms
from shufcalc.search import Bounds, DerivationSearch
from shufcalc.syntax import parse
from shufcalc.transport import derive
from shufcalc.typesys import (
    EMPTY_ENV,
    Judgment,
    ZERO,
    AppNode,
    BadPartition,
    LamNode,
    NotAValue,
    PositiveType,
    TypeEnv,
    TypeMismatch,
    app_node,
    arrow,
    ax,
    check_derivation,
    decompose_value,
    derivation_from_json,
    derivation_to_json,
    env_of,
    env_single,
    env_sum,
    lam,
    merge_value,
    multiset,
    rebind,
    rename_derivation,
    singleton,
    size,
    substitute_derivation,
    subject_of,
    type_from_json,
    type_of,
    type_sum,
    type_to_json,
    zero_derivation,
)

P = parse
I = P(r"\x. x")
II = P(r"(\x. x) (\x. x)")
N = arrow(ZERO, ZERO)
M = arrow(singleton(ZERO, ZERO), ZERO)


def pi_II():
    return app_node(lam(I, "x", [ax("x", ZERO)]), zero_derivation(I))


# ------------- types and environments -------------


def test_multiset_is_not_idempotent():
    assert multiset(N) + multiset(N) == multiset(N, N) != multiset(N)
    assert len(multiset(N, N)) == 2


def test_multiset_equality_ignores_order():
    assert multiset(N, M) == multiset(M, N)


def test_canonical_order_by_cardinality_first():
    wide_res = arrow(ZERO, multiset(N, N))
    assert multiset(wide_res, M).elems == (wide_res, M)


def test_zero_is_unit():
    p = multiset(N, M)
    assert p + ZERO == p == ZERO + p
    assert str(ZERO) == "0" and not ZERO


def test_type_json_roundtrip():
    p = multiset(M, N, N)
    assert type_from_json(json.loads(json.dumps(type_to_json(p)))) == p
    assert type_to_json(singleton(ZERO, ZERO)) == [["arrow", [], []]]


def test_arrow_count():
    assert multiset(M).arrows == 2 and ZERO.arrows == 0


def test_env_sum_examples():
    x1, x2 = env_single("x", multiset(N)), env_single("x", multiset(N))
    assert env_sum(x1, x2) == env_single("x", multiset(N, N))
    assert env_sum(x1, EMPTY_ENV) == x1
    both = env_sum(x1, env_single("y", multiset(M)))
    assert both.get("x") == multiset(N) and both.get("y") == multiset(M)


def test_env_drops_zero_bindings():
    assert TypeEnv.of({"x": ZERO}) == EMPTY_ENV
    assert env_single("x", ZERO) == EMPTY_ENV


arrows = st.sampled_from([N, M, arrow(ZERO, multiset(N)), arrow(multiset(N, N), ZERO)])
positives = st.lists(arrows, max_size=3).map(lambda xs: PositiveType(tuple(xs)))
envs = st.dictionaries(st.sampled_from("xyz"), positives).map(TypeEnv.of)


@given(envs, envs, envs)
def test_env_sum_is_commutative_monoid(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a + EMPTY_ENV == a


@given(positives, positives)
def test_type_sum_commutes(p, q):
    assert p + q == q + p == type_sum([p, q])


# ------------- derivations and the checker -------------


def test_pi_I_valid_size_0():
    for pi in (zero_derivation(I), lam(I, "x", [ax("x", ZERO)])):
        assert check_derivation(pi) == [] and size(pi) == 0


def test_pi_II_valid_size_1():
    pi = pi_II()
    assert check_derivation(pi) == [] and size(pi) == 1
    assert type_of(pi) == ZERO and env_of(pi) == EMPTY_ENV


def test_checker_flags_argument_mismatch():
    left, right = ax("x", singleton(multiset(N), ZERO)), ax("y", ZERO)
    conclusion = Judgment(env_of(left) + env_of(right), P("x y"), ZERO)
    bad = AppNode(conclusion, left, right)
    found = check_derivation(bad)
    assert len(found) == 1 and "argument type" in found[0].reason


def test_checker_flags_wrong_lambda_type():
    pi = lam(I, "x", [ax("x", ZERO)])
    forged = LamNode(type(pi.conclusion)(EMPTY_ENV, I, ZERO), "x", pi.premises)
    assert check_derivation(forged)


def test_app_node_rejects_mismatch():
    with pytest.raises(TypeMismatch):
        app_node(ax("x", singleton(multiset(N), ZERO)), ax("y", ZERO))
    with pytest.raises(TypeMismatch):
        app_node(ax("x", multiset(N, N)), ax("y", ZERO))


def test_zero_derivation_rejects_application():
    with pytest.raises(NotAValue):
        zero_derivation(II)


# ------------- values -------------


def test_decompose_empty_parts():
    assert decompose_value(zero_derivation(I), []) == []


def test_decompose_axiom():
    d = ax("x", multiset(N, M))
    a, b = decompose_value(d, [multiset(N), multiset(M)])
    assert (type_of(a), type_of(b)) == (multiset(N), multiset(M))


def test_decompose_bad_partition():
    with pytest.raises(BadPartition):
        decompose_value(ax("x", multiset(N)), [multiset(M)])


def test_pi_k_split_into_singletons():
    t = P(r"\y. (\x. x) (\x. x)")
    body = pi_II()
    k = 3
    pi_k = lam(t, "y", [body] * k)
    assert size(pi_k) == k and check_derivation(pi_k) == []
    pieces = decompose_value(pi_k, [singleton(ZERO, ZERO)] * k)
    assert [size(p) for p in pieces] == [1] * k
    assert merge_value(pieces) == pi_k


def _value_derivations():
    search = DerivationSearch(Bounds(2, 1))
    out = []
    for text in [r"\x. x", r"\x. x x", r"\x. \y. x y", "x"]:
        out += list(search.derivations(P(text)))[:40]
    return out


VALUE_DERIVATIONS = _value_derivations()


@given(st.sampled_from(VALUE_DERIVATIONS), st.randoms(use_true_random=False))
def test_decompose_merge_roundtrip(d, rnd):
    elems = list(type_of(d).elems)
    rnd.shuffle(elems)
    cut = rnd.randint(0, len(elems))
    parts = [PositiveType(tuple(elems[:cut])), PositiveType(tuple(elems[cut:]))]
    pieces = decompose_value(d, parts)
    assert [type_of(p) for p in pieces] == parts
    assert all(check_derivation(p) == [] for p in pieces)
    assert sum(size(p) for p in pieces) == size(d)
    merged = merge_value(pieces, subject_of(d))
    assert type_of(merged) == type_of(d) and env_of(merged) == env_of(d) and size(merged) == size(d)


# ------------- substitution -------------


def test_substitution_example():
    # x (\z. z) with x used at [[0 -o 0] -o [0 -o 0]]; \w. w typed to match
    w = P(r"\w. w")
    piv = lam(w, "w", [ax("w", singleton(ZERO, ZERO))])
    pi = app_node(ax("x", type_of(piv)), lam(P(r"\z. z"), "z", [ax("z", ZERO)]))
    assert size(pi) == 1 and size(piv) == 0
    out = substitute_derivation(pi, "x", piv)
    assert subject_of(out) == P(r"(\w. w) (\z. z)")
    assert check_derivation(out) == [] and size(out) == 1


def test_substitution_on_unrelated_variable():
    pi = ax("y", ZERO)
    assert substitute_derivation(pi, "x", zero_derivation(I)) == pi


def test_substitution_type_mismatch():
    with pytest.raises(TypeMismatch):
        substitute_derivation(ax("x", multiset(N)), "x", zero_derivation(I))


# ------------- renaming and serialization -------------


def test_rename_and_rebind():
    pi = app_node(ax("x", singleton(ZERO, ZERO)), ax("y", ZERO))
    out = rename_derivation(pi, "x", "q")
    assert subject_of(out) == P("q y") and check_derivation(out) == []
    d = lam(I, "x", [ax("x", ZERO)])
    assert rebind(d, "w").binder == "w" and check_derivation(rebind(d, "w")) == []


@given(terms(10))
def test_derived_derivations_check_and_roundtrip(t):
    found = derive(t, 300)
    if found is None:
        return
    pi, _ = found
    assert check_derivation(pi) == []
    data = json.loads(json.dumps(derivation_to_json(pi)))
    back = derivation_from_json(data)
    assert check_derivation(back) == [] and size(back) == size(pi)
    assert derivation_to_json(back) == data


def test_json_without_binder_key_is_inferred():
    data = derivation_to_json(pi_II())
    del data["premises"][0]["binder"]
    back = derivation_from_json(data)
    assert check_derivation(back) == [] and size(back) == 1


def test_json_schema_keys():
    data = derivation_to_json(pi_II())
    assert {"rule", "env", "term", "type", "premises"} <= set(data)
    assert data["rule"] == "app" and data["type"] == []
