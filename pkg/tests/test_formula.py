import random

import pytest
from hypothesis import given, settings, strategies as st

from rcbench.formula import (
    TOP, Atom, CaptureError, Conj, Const, Dia, Forall, Mode, ParseError, Sequent, Signature,
    SignatureError, Var, free_vars, is_free_for, modal_depth, parse, parse_formula, parse_sequent,
    substitute, symbols_of, to_text,
)
from rcbench.calculus import random_formula

P = lambda *a: Atom("P", a)
S = lambda *a: Atom("S", a)
p, q = Atom("p"), Atom("q")
x0, x1, x2 = Var(0), Var(1), Var(2)
c0 = Const(0)


# -- parsing -------------------------------------------------------------------

def test_parse_sequent():
    assert parse("<><>p |- <>p") == Sequent(Dia(0, Dia(0, p)), Dia(0, p))


def test_parse_quantifier():
    assert parse_formula("A x0. <>P(x0)") == Forall(x0, Dia(0, P(x0)))


def test_parse_polymodal():
    assert parse_formula("<1>p & <0>q", mode=Mode.POLY) == Conj(Dia(1, p), Dia(0, q))


def test_indexed_diamond_needs_poly_mode():
    with pytest.raises(ParseError):
        parse_formula("<1>p & <0>q")


@pytest.mark.parametrize("bad", ["", "p |-", "<>(p", "A x0 P(x0)", "p & & q", "P(x0,", "T T"])
def test_malformed_input_rejected(bad):
    with pytest.raises(ParseError):
        parse(bad)


def test_parse_error_has_position():
    with pytest.raises(ParseError) as exc:
        parse("p & )")
    assert exc.value.pos is not None


def test_signature_errors():
    sig = Signature({"P": 1})
    with pytest.raises(ParseError, match="arity"):
        parse_formula("P(x0, x1)", signature=sig)
    with pytest.raises(ParseError):
        parse_formula("Q(x0)", signature=sig)


def test_quantifier_rejected_in_propositional_mode():
    with pytest.raises(ParseError):
        parse_formula("A x0. p", mode=Mode.PROP)


def test_signature_rejects_clashing_names():
    with pytest.raises(SignatureError):
        Signature({"c0": 0}, frozenset({"c0"}))


def test_signature_of():
    sig = Signature.of(parse_formula("<>S(x0, c1) & p"))
    assert sig.predicates == {"S": 2, "p": 0}
    assert sig.constants == frozenset({"c1"})


# -- free variables and substitution -------------------------------------------

@pytest.mark.parametrize("phi,expected", [
    (Forall(x0, P(x0)), set()),
    (Dia(0, P(x0)), {x0}),
    (Forall(x0, S(x0, x1)), {x1}),
])
def test_free_vars(phi, expected):
    assert free_vars(phi) == expected


def test_substitute_examples():
    assert substitute(Dia(0, P(x0)), x0, c0) == Dia(0, P(c0))
    assert substitute(Forall(x0, P(x0)), x0, c0) == Forall(x0, P(x0))
    with pytest.raises(CaptureError):
        substitute(Forall(x1, S(x0, x1)), x0, x1)


def test_is_free_for_examples():
    phi = Forall(x1, S(x0, x1))
    assert is_free_for(c0, x0, phi)
    assert not is_free_for(x1, x0, phi)
    assert is_free_for(x2, x0, phi)


@pytest.mark.parametrize("phi,d", [
    (TOP, 0),
    (Dia(0, Dia(0, p)), 2),
    (Conj(Dia(0, p), Forall(x0, Dia(0, Dia(0, P(x0))))), 2),
])
def test_modal_depth(phi, d):
    assert modal_depth(phi) == d


def test_symbols_of():
    assert symbols_of(Dia(0, P(c0))) == {"P", "c0"}
    assert symbols_of(TOP) == frozenset()
    assert symbols_of(Conj(p, q)) == {"p", "q"}


# -- properties ----------------------------------------------------------------

PREDS = {"p": 0, "P": 1, "S": 2}


@st.composite
def formulas(draw, quantified=True):
    seed = draw(st.integers(0, 2**32 - 1))
    depth = draw(st.integers(0, 5))
    return random_formula(random.Random(seed), PREDS if quantified else {"p": 0, "q": 0}, depth,
                          quantified=quantified)


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_print_parse_round_trip(phi):
    assert parse_formula(to_text(phi)) == phi


@settings(max_examples=200, deadline=None)
@given(formulas(), formulas())
def test_sequent_round_trip(a, b):
    s = Sequent(a, b)
    assert parse_sequent(str(s)) == s


@settings(max_examples=200, deadline=None)
@given(formulas(), st.sampled_from([x0, x1]), st.sampled_from([c0, Const(1), x2]))
def test_substitution_removes_variable(phi, x, t):
    if not is_free_for(t, x, phi):
        with pytest.raises(CaptureError):
            substitute(phi, x, t)
        return
    out = substitute(phi, x, t)
    assert x not in free_vars(out)
    assert free_vars(out) <= (free_vars(phi) - {x}) | ({t} if isinstance(t, Var) and x in free_vars(phi) else set())
    assert modal_depth(out) == modal_depth(phi)


@settings(max_examples=200, deadline=None)
@given(formulas())
def test_depth_bounds(phi):
    assert modal_depth(Dia(0, phi)) == modal_depth(phi) + 1
    assert modal_depth(Conj(phi, TOP)) == modal_depth(phi)
