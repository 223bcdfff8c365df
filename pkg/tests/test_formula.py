"""Parser, printer and truth-table semantics."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logictutor.errors import ParseError, TooManyAtoms
from logictutor.formula import (
    And,
    Atom,
    Iff,
    Implies,
    Not,
    Or,
    atoms,
    entails,
    evaluate,
    parse,
    render,
)


def test_parse_conjunction():
    assert parse("I&F") == And(Atom("I"), Atom("F"))


def test_parse_nested_implication():
    assert parse("F->(G&~H)") == Implies(
        Atom("F"), And(Atom("G"), Not(Atom("H")))
    )


def test_parse_rejects_double_operator():
    with pytest.raises(ParseError) as exc:
        parse("I&&F")
    assert exc.value.position == 2


def test_parse_rejects_lowercase_atom():
    with pytest.raises(ParseError):
        parse("a&B")


def test_parse_rejects_trailing_garbage():
    with pytest.raises(ParseError):
        parse("A&B)")


def test_parse_unicode_aliases():
    assert parse("G∧¬H") == parse("G&~H")
    assert parse("A∨B") == parse("A|B")
    assert parse("A→B↔C") == parse("A->B<->C")


def test_implies_right_associative():
    assert parse("A->B->C") == Implies(Atom("A"), Implies(Atom("B"), Atom("C")))


def test_and_or_precedence():
    assert parse("A&B|C") == Or(And(Atom("A"), Atom("B")), Atom("C"))
    assert parse("~A&B") == And(Not(Atom("A")), Atom("B"))


def test_render_examples():
    assert render(And(Atom("I"), Atom("F"))) == "I&F"
    assert render(Atom("J")) == "J"
    # Implication body needs no parentheses: & binds tighter than ->.
    f = Implies(Atom("F"), And(Atom("G"), Not(Atom("H"))))
    assert render(f) == "F->G&~H"
    assert parse(render(f)) == f


def test_render_distinguishes_association():
    left = And(And(Atom("A"), Atom("B")), Atom("C"))
    right = And(Atom("A"), And(Atom("B"), Atom("C")))
    assert render(left) == "A&B&C"
    assert render(right) == "A&(B&C)"
    assert parse(render(left)) == left
    assert parse(render(right)) == right


def test_render_implication_association():
    chain = Implies(Atom("A"), Implies(Atom("B"), Atom("C")))
    grouped = Implies(Implies(Atom("A"), Atom("B")), Atom("C"))
    assert render(chain) == "A->B->C"
    assert render(grouped) == "(A->B)->C"
    assert parse(render(grouped)) == grouped


def _random_formula(rng: random.Random, depth: int):
    if depth == 0 or rng.random() < 0.3:
        return Atom(rng.choice("ABCDEFGH"))
    kind = rng.randrange(5)
    if kind == 0:
        return Not(_random_formula(rng, depth - 1))
    cls = (And, Or, Implies, Iff)[kind - 1]
    return cls(_random_formula(rng, depth - 1), _random_formula(rng, depth - 1))


def test_round_trip_10000_random_formulas():
    rng = random.Random(20240404)
    for _ in range(10_000):
        f = _random_formula(rng, rng.randint(0, 6))
        text = render(f)
        assert parse(text) == f
        assert render(parse(text)) == text


@st.composite
def formulas(draw, max_depth=5):
    if max_depth == 0:
        return Atom(draw(st.sampled_from("ABCDE")))
    kind = draw(st.integers(0, 6))
    if kind <= 1:
        return Atom(draw(st.sampled_from("ABCDE")))
    if kind == 2:
        return Not(draw(formulas(max_depth=max_depth - 1)))
    cls = (And, Or, Implies, Iff)[kind - 3]
    left = draw(formulas(max_depth=max_depth - 1))
    right = draw(formulas(max_depth=max_depth - 1))
    return cls(left, right)


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_round_trip_property(f):
    assert parse(render(f)) == f


def test_atoms():
    assert atoms(parse("F->(G&~H)")) == {"F", "G", "H"}


def test_evaluate():
    f = parse("A->B")
    assert evaluate(f, {"A": False, "B": False})
    assert not evaluate(f, {"A": True, "B": False})
    assert evaluate(parse("A<->B"), {"A": True, "B": True})
    assert not evaluate(parse("A<->B"), {"A": True, "B": False})


def test_entails_examples():
    assert entails({parse("I&F")}, parse("F"))
    assert entails({parse("F->(G&~H)"), parse("F")}, parse("G&~H"))
    assert not entails({parse("F")}, parse("G"))


def test_entails_atom_cap():
    big = parse("&".join("ABCDEFGHIJKLMNOPQRSTU"))
    with pytest.raises(TooManyAtoms):
        entails({big}, parse("A"))
