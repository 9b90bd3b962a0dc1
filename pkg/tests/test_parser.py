import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from effrew.parser import ParseError, parse_term, parse_type
from effrew.terms import (
    App,
    Arrow,
    Base,
    Eff,
    Lam,
    Let,
    Pure,
    Var,
    eff,
    fn,
    print_term,
)
from effrew.theories import builtin
from termgen import RPO_SIG, symbolic_term

GS_SIG = builtin("global-state").signature


def test_parse_var():
    assert parse_term("x", GS_SIG) == Var("x")


def test_parse_lam_app():
    assert parse_term("(lam x x)", GS_SIG) == Lam("x", Var("x"))
    assert parse_term("(app f v)", GS_SIG) == App(Var("f"), Var("v"))


def test_parse_pure_let():
    assert parse_term("(pure v)", GS_SIG) == Pure(Var("v"))
    assert parse_term("(let x (pure v) x)", GS_SIG) == Let("x", Pure(Var("v")), Var("x"))


def test_parse_effect_with_param():
    t = parse_term("(eff assign (1) (pure v))", GS_SIG)
    assert t == eff("assign", Pure(Var("v")), params=(1,))


def test_parse_effect_no_param():
    t = parse_term("(eff get () (pure a) (pure b))", GS_SIG)
    assert t == eff("get", Pure(Var("a")), Pure(Var("b")))


def test_parse_function_symbol():
    peano = builtin("peano").signature
    assert parse_term("(fn zero)", peano) == fn("zero")
    assert parse_term("(fn succ (fn zero))", peano) == fn("succ", fn("zero"))


def test_comments_allowed():
    t = parse_term("; note\n(pure x) ; end", GS_SIG)
    assert t == Pure(Var("x"))


def test_unknown_effect_rejected():
    with pytest.raises(ParseError):
        parse_term("(eff launch () (pure v))", GS_SIG)


def test_wrong_arity_rejected():
    with pytest.raises(ParseError):
        parse_term("(eff get () (pure a))", GS_SIG)
    with pytest.raises(ParseError):
        parse_term("(eff assign (1) (pure a) (pure b))", GS_SIG)


def test_param_outside_domain_rejected():
    with pytest.raises(ParseError):
        parse_term("(eff assign (9) (pure v))", GS_SIG)


def test_missing_param_rejected():
    with pytest.raises(ParseError):
        parse_term("(eff assign () (pure v))", GS_SIG)


def test_param_on_parameterless_effect_rejected():
    with pytest.raises(ParseError):
        parse_term("(eff get (1) (pure a) (pure b))", GS_SIG)


def test_syntax_error_mentions_location():
    with pytest.raises(ParseError) as exc:
        parse_term("(pure", GS_SIG)
    assert "line" in str(exc.value) or ":" in str(exc.value)


def test_malformed_let():
    with pytest.raises(ParseError):
        parse_term("(let x (pure v))", GS_SIG)


def test_parse_type_forms():
    assert parse_type("val") == Base("val")
    assert parse_type("(E val)") == Eff(Base("val"))
    assert parse_type("(-> val (E val))") == Arrow(Base("val"), Eff(Base("val")))
    assert parse_type("(E (E nat))") == Eff(Eff(Base("nat")))


def test_parse_type_errors():
    with pytest.raises(ParseError):
        parse_type("(E)")
    with pytest.raises(ParseError):
        parse_type("(-> val)")


@given(st.integers(0, 2**32 - 1), st.integers(1, 14))
def test_print_parse_roundtrip_symbolic(seed, budget):
    t = symbolic_term(random.Random(seed), budget)
    assert parse_term(print_term(t), RPO_SIG) == t


def test_print_parse_roundtrip_binders():
    samples = [
        "(let x (pure v) (lam y (app y x)))",
        "(eff or () (pure a) (let x (pure b) (pure x)))",
        "(lam x (lam x x))",
    ]
    sig = builtin("nondet").signature
    for text in samples:
        t = parse_term(text, sig)
        assert parse_term(print_term(t), sig) == t
