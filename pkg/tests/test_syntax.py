import pytest
from hypothesis import given

import oracle
from strategies import terms, values
from shufcalc.syntax import (
    Abs,
    App,
    Bound,
    NonValueSubstituend,
    ParseError,
    TermClass,
    Var,
    alpha_eq,
    classify,
    close,
    free_vars,
    fresh,
    instantiate,
    is_closed,
    node_count,
    open_body,
    parse,
    print_term,
    shift,
    subst,
    term_to_json,
)

I = Abs(Bound(0))
DELTA = Abs(App(Bound(0), Bound(0)))


# ------------- parsing -------------


def test_parse_identity():
    assert parse(r"\x. x") == I


def test_parse_delta_delta():
    assert parse(r"(\x. x x) (\x. x x)") == App(DELTA, DELTA)


def test_parse_unicode_lambda_and_primes():
    assert parse("λx. x y'") == Abs(App(Bound(0), Var("y'")))


def test_parse_stuck_loop_z_term():
    t = parse(r"(\y. \x. x x) (z (\w. w)) (\x. x x)")
    assert t == App(App(Abs(DELTA), App(Var("z"), I)), DELTA)


def test_application_is_left_associative():
    assert parse("x y z") == App(App(Var("x"), Var("y")), Var("z"))


def test_lambda_scope_is_maximal():
    assert parse(r"\x. x y") == Abs(App(Bound(0), Var("y")))


def test_trailing_lambda_argument():
    assert parse(r"x \y. y") == App(Var("x"), I)


def test_shadowing_binds_innermost():
    assert parse(r"\x. \x. x") == Abs(Abs(Bound(0)))


@pytest.mark.parametrize("text", ["", "(x", r"\. x", r"\x x", "x )", "1x", r"\x."])
def test_parse_errors_carry_position(text):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert 0 <= info.value.pos <= len(text)


# ------------- printing -------------


def test_print_identity():
    assert print_term(I) == r"\x. x"


def test_print_minimal_parens():
    assert print_term(App(Var("x"), I)) == r"x (\y. y)"
    assert print_term(parse("x (y z) w")) == "x (y z) w"
    assert print_term(parse(r"(\x. x) y")) == r"(\x. x) y"


def test_print_renames_alpha_variant():
    assert print_term(parse(r"\z. z z")) == r"\x. x x"


def test_print_avoids_free_names():
    assert print_term(parse(r"\w. x w")) == r"\y. x y"


@given(terms())
def test_print_parse_roundtrip(t):
    assert parse(print_term(t)) == t


@given(terms())
def test_ast_json_matches_named_oracle(t):
    assert oracle.canon(oracle.from_term(t)) == oracle.canon(oracle.from_term(parse(print_term(t))))
    assert term_to_json(t)[0] in ("var", "lam", "app")


# ------------- free variables and alpha -------------


def test_free_vars_examples():
    assert free_vars(DELTA) == frozenset()
    assert free_vars(parse(r"(\y. \x. x x) (x (\x. x)) (\x. x x)")) == {"x"}
    assert free_vars(parse(r"\x. x y")) == {"y"}


def test_alpha_eq_examples():
    assert alpha_eq(parse(r"\x. x"), parse(r"\y. y"))
    assert alpha_eq(parse(r"\x. x y"), parse(r"\z. z y"))
    assert not alpha_eq(parse(r"\x. x"), parse(r"\x. x x"))


def test_distinct_free_variables_stay_distinct():
    assert parse(r"\x. y") != parse(r"\x. z")


@given(terms())
def test_free_vars_match_oracle(t):
    assert free_vars(t) == oracle.fv(oracle.from_term(t))


# ------------- substitution -------------


def test_subst_examples():
    assert subst(parse("x x"), "x", parse(r"\z. z")) == parse(r"(\z. z) (\z. z)")
    assert subst(parse("y"), "x", DELTA) == Var("y")


def test_subst_avoids_capture():
    out = subst(parse(r"\y. x"), "x", Var("y"))
    assert out == parse(r"\w. y")
    assert print_term(out) == r"\x. y"


def test_subst_rejects_application():
    with pytest.raises(NonValueSubstituend):
        subst(Var("x"), "x", parse("y y"))


@given(terms(), values)
def test_subst_matches_named_oracle(t, v):
    want = oracle.subst(oracle.from_term(t), "x", oracle.from_term(v))
    assert oracle.canon(oracle.from_term(subst(t, "x", v))) == oracle.canon(want)


@given(terms())
def test_open_close_roundtrip(t):
    name = fresh(free_vars(t))
    body = shift(t, 1)
    assert close(open_body(body, name), name) == body
    assert instantiate(shift(t, 1), Var("q")) == t


# ------------- classification -------------


@pytest.mark.parametrize(
    "text, cls",
    [
        (r"x (\y. y)", TermClass.APPLICATIVE_NORMAL),
        (r"(\x. z) (y (\w. w))", TermClass.NORMAL),
        (r"(\y. \x. x x) (x (\x. x)) (\x. x x)", TermClass.REDUCIBLE),
        (r"\y. (\x. x) (\x. x)", TermClass.VALUE),
        ("x", TermClass.VALUE),
        ("x y z", TermClass.APPLICATIVE_NORMAL),
        (r"(\x. x) y", TermClass.REDUCIBLE),
    ],
)
def test_classify(text, cls):
    assert classify(parse(text)) is cls


@given(terms())
def test_classify_agrees_with_oracle_normality(t):
    assert (classify(t) is TermClass.REDUCIBLE) == bool(oracle.steps(oracle.from_term(t)))


def test_node_count_and_closed():
    assert node_count(App(DELTA, DELTA)) == 9
    assert is_closed(DELTA) and not is_closed(Var("x"))
