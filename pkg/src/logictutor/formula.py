"""Propositional formulas: expression tree, parser, printer, truth tables.

Grammar (ASCII, used verbatim in logs, snapshots and API payloads):

    atoms       A-Z (single uppercase letter)
    ~  not      binds tightest
    &  and
    |  or
    -> implies  right-associative
    <-> iff
    parentheses override precedence

Unicode connectives (`∧ ∨ ¬ → ↔`) are accepted as input aliases; output
is always ASCII.  Equality of formulas is structural: ``I&F`` and ``F&I``
are distinct statements (related by the Com rule).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import ParseError, TooManyAtoms

MAX_ENTAILMENT_ATOMS = 20


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


Formula = Atom | Not | And | Or | Implies | Iff

_BINARY = {And: "&", Or: "|", Implies: "->", Iff: "<->"}

# Higher binds tighter.  Not > And > Or > Implies > Iff.
_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5, Atom: 6}

# -> and <-> associate to the right, & and | to the left.
_RIGHT_ASSOC = (Implies, Iff)

_UNICODE_ALIASES = {"∧": "&", "∨": "|", "¬": "~", "→": "->", "↔": "<->", "−>": "->"}


class _Tokenizer:
    """Splits an input string into (kind, text, position) tokens."""

    def __init__(self, text: str, allow_lowercase: bool = False):
        self.text = text
        self.pos = 0
        self.allow_lowercase = allow_lowercase

    def tokens(self):
        out = []
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch.isspace():
                self.pos += 1
                continue
            if ch in _UNICODE_ALIASES:
                out.append((_UNICODE_ALIASES[ch], ch, self.pos))
                self.pos += 1
                continue
            if ch.isalpha():
                if not ("A" <= ch <= "Z") and not self.allow_lowercase:
                    raise ParseError(self.pos, "uppercase atom A-Z")
                out.append(("atom", ch, self.pos))
                self.pos += 1
                continue
            if ch in "~&|()":
                out.append((ch, ch, self.pos))
                self.pos += 1
                continue
            if self.text.startswith("<->", self.pos):
                out.append(("<->", "<->", self.pos))
                self.pos += 3
                continue
            if self.text.startswith("->", self.pos):
                out.append(("->", "->", self.pos))
                self.pos += 2
                continue
            raise ParseError(self.pos, "formula symbol")
        out.append(("end", "", len(self.text)))
        return out


class _Parser:
    """Recursive descent over the connective precedence ladder."""

    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str):
        tok = self.take()
        if tok[0] != kind:
            raise ParseError(tok[2], kind)
        return tok

    def parse(self) -> Formula:
        f = self.iff()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(tok[2], "end of input")
        return f

    def iff(self) -> Formula:
        left = self.implies()
        if self.peek()[0] == "<->":
            self.take()
            return Iff(left, self.iff())
        return left

    def implies(self) -> Formula:
        left = self.disjunct()
        if self.peek()[0] == "->":
            self.take()
            return Implies(left, self.implies())
        return left

    def disjunct(self) -> Formula:
        left = self.conjunct()
        while self.peek()[0] == "|":
            self.take()
            left = Or(left, self.conjunct())
        return left

    def conjunct(self) -> Formula:
        left = self.unary()
        while self.peek()[0] == "&":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok[0] == "~":
            self.take()
            return Not(self.unary())
        if tok[0] == "(":
            self.take()
            f = self.iff()
            self.expect(")")
            return f
        if tok[0] == "atom":
            self.take()
            return Atom(tok[1])
        raise ParseError(tok[2], "atom, '~' or '('")


def parse(text: str) -> Formula:
    """Parse an ASCII (or unicode-aliased) formula string."""
    return _Parser(_Tokenizer(text).tokens()).parse()


def parse_pattern(text: str) -> Formula:
    """Parse a rule schema; lowercase atoms act as pattern variables."""
    return _Parser(_Tokenizer(text, allow_lowercase=True).tokens()).parse()


def render(f: Formula) -> str:
    """Minimal-parentheses canonical string; ``parse(render(f)) == f``."""
    return _render(f, 0, False)


def _render(f: Formula, parent_prec: int, tight_side: bool) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "~" + _render(f.child, _PREC[Not], False)
    prec = _PREC[type(f)]
    op = _BINARY[type(f)]
    if type(f) in _RIGHT_ASSOC:
        left = _render(f.left, prec, True)
        right = _render(f.right, prec, False)
    else:
        left = _render(f.left, prec, False)
        right = _render(f.right, prec, True)
    text = f"{left}{op}{right}"
    if prec < parent_prec or (prec == parent_prec and tight_side):
        return f"({text})"
    return text


def atoms(f: Formula) -> frozenset[str]:
    """The set of atom letters occurring in the formula."""
    if isinstance(f, Atom):
        return frozenset((f.name,))
    if isinstance(f, Not):
        return atoms(f.child)
    return atoms(f.left) | atoms(f.right)


def evaluate(f: Formula, assignment: dict[str, bool]) -> bool:
    """Truth value of ``f`` under a total assignment of its atoms."""
    if isinstance(f, Atom):
        return assignment[f.name]
    if isinstance(f, Not):
        return not evaluate(f.child, assignment)
    a = evaluate(f.left, assignment)
    b = evaluate(f.right, assignment)
    if isinstance(f, And):
        return a and b
    if isinstance(f, Or):
        return a or b
    if isinstance(f, Implies):
        return (not a) or b
    return a == b


def entails(premises, conclusion: Formula) -> bool:
    """Exhaustive truth-table check that the premises entail the conclusion.

    Raises TooManyAtoms beyond 20 distinct atoms (2^20 assignments).
    """
    letters = set()
    for p in premises:
        letters |= atoms(p)
    letters |= atoms(conclusion)
    if len(letters) > MAX_ENTAILMENT_ATOMS:
        raise TooManyAtoms(
            f"{len(letters)} atoms exceeds the {MAX_ENTAILMENT_ATOMS}-atom cap"
        )
    names = sorted(letters)
    for values in itertools.product((False, True), repeat=len(names)):
        assignment = dict(zip(names, values))
        if all(evaluate(p, assignment) for p in premises):
            if not evaluate(conclusion, assignment):
                return False
    return True
