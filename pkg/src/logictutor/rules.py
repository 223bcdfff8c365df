"""Inference and replacement rule catalog, with application and validation.

Rules are schemas over pattern variables (lowercase letters; real atoms
are uppercase, so the namespaces cannot collide).  Replacement rules are
applied at the top level of a formula only; rewriting inside subformulas
is out of scope.  Two-premise rules accept their premises in either
order and the result set is the union over both orderings.

Add is the one unbounded rule: the introduced disjunct is the student's
to choose, so ``enumerate_conclusions`` returns an unbounded marker and
``validate_derivation`` checks the claimed formula against the schema.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ArityMismatch, NotApplicable
from .formula import Atom, Formula, Not, Or, parse_pattern

# --- pattern matching ------------------------------------------------------

# Patterns reuse the formula AST; a lowercase Atom is a schema variable.


def _is_var(p) -> bool:
    return isinstance(p, Atom) and p.name.islower()


def match(pattern: Formula, f: Formula, binding: dict[str, Formula]) -> dict | None:
    """Unify ``f`` against ``pattern``, extending ``binding``; None on failure."""
    if _is_var(pattern):
        bound = binding.get(pattern.name)
        if bound is None:
            out = dict(binding)
            out[pattern.name] = f
            return out
        return binding if bound == f else None
    if type(pattern) is not type(f):
        return None
    if isinstance(pattern, Atom):
        return binding if pattern.name == f.name else None
    if isinstance(pattern, Not):
        return match(pattern.child, f.child, binding)
    b = match(pattern.left, f.left, binding)
    if b is None:
        return None
    return match(pattern.right, f.right, b)


def instantiate(pattern: Formula, binding: dict[str, Formula]) -> Formula:
    if _is_var(pattern):
        return binding[pattern.name]
    if isinstance(pattern, Atom):
        return pattern
    if isinstance(pattern, Not):
        return Not(instantiate(pattern.child, binding))
    cls = type(pattern)
    return cls(instantiate(pattern.left, binding), instantiate(pattern.right, binding))


# --- rule definitions ------------------------------------------------------


@dataclass(frozen=True)
class Schema:
    premises: tuple[Formula, ...]
    conclusions: tuple[Formula, ...]


@dataclass(frozen=True)
class Rule:
    id: str
    name: str
    arity: int
    kind: str  # "inference" | "replacement"
    schemas: tuple[Schema, ...]
    unbounded: bool = False


@dataclass(frozen=True)
class RuleOutcome:
    """Finite set of derivable conclusions, or an unbounded marker (Add)."""

    conclusions: frozenset[Formula] | None
    unbounded: bool = False


def _s(premises: list[str], conclusions: list[str]) -> Schema:
    return Schema(
        tuple(parse_pattern(p) for p in premises),
        tuple(parse_pattern(c) for c in conclusions),
    )


def _inference(rid, name, arity, *schemas) -> Rule:
    return Rule(rid, name, arity, "inference", tuple(schemas))


def _replacement(rid, name, *pairs) -> Rule:
    # Each pair is a bidirectional top-level rewrite lhs <=> rhs.
    schemas = []
    for lhs, rhs in pairs:
        schemas.append(_s([lhs], [rhs]))
        schemas.append(_s([rhs], [lhs]))
    return Rule(rid, name, 1, "replacement", tuple(schemas))


CATALOG: dict[str, Rule] = {
    r.id: r
    for r in [
        _inference("MP", "Modus Ponens", 2, _s(["p->q", "p"], ["q"])),
        _inference("MT", "Modus Tollens", 2, _s(["p->q", "~q"], ["~p"])),
        _inference(
            "DS",
            "Disjunctive Syllogism",
            2,
            _s(["p|q", "~p"], ["q"]),
            _s(["p|q", "~q"], ["p"]),
        ),
        _inference("HS", "Hypothetical Syllogism", 2, _s(["p->q", "q->r"], ["p->r"])),
        _inference("Simp", "Simplification", 1, _s(["p&q"], ["p", "q"])),
        _inference("Conj", "Conjunction", 2, _s(["p", "q"], ["p&q"])),
        Rule(
            "Add",
            "Addition",
            1,
            "inference",
            (_s(["p"], ["p|x"]),),
            unbounded=True,
        ),
        _inference(
            "CD", "Constructive Dilemma", 2, _s(["(p->q)&(r->s)", "p|r"], ["q|s"])
        ),
        _replacement("DN", "Double Negation", ("p", "~~p")),
        _replacement(
            "DeM", "De Morgan's", ("~(p&q)", "~p|~q"), ("~(p|q)", "~p&~q")
        ),
        _replacement("Impl", "Material Implication", ("p->q", "~p|q")),
        _replacement("Trans", "Transposition", ("p->q", "~q->~p")),
        _replacement(
            "Equiv",
            "Material Equivalence",
            ("p<->q", "(p->q)&(q->p)"),
            ("p<->q", "(p&q)|(~p&~q)"),
        ),
        _replacement("Exp", "Exportation", ("(p&q)->r", "p->(q->r)")),
        _replacement("Taut", "Tautology", ("p", "p|p"), ("p", "p&p")),
        _replacement("Com", "Commutation", ("p&q", "q&p"), ("p|q", "q|p")),
        _replacement(
            "Assoc", "Association", ("(p&q)&r", "p&(q&r)"), ("(p|q)|r", "p|(q|r)")
        ),
        _replacement(
            "Dist",
            "Distribution",
            ("p&(q|r)", "(p&q)|(p&r)"),
            ("p|(q&r)", "(p|q)&(p|r)"),
        ),
    ]
}

INFERENCE_RULE_IDS = tuple(r.id for r in CATALOG.values() if r.kind == "inference")
REPLACEMENT_RULE_IDS = tuple(r.id for r in CATALOG.values() if r.kind == "replacement")

_ARITY_MESSAGE = {1: "Rule requires one premise", 2: "Rule requires two premises"}


def _check_arity(rule: Rule, premises) -> None:
    if len(premises) != rule.arity:
        raise ArityMismatch(_ARITY_MESSAGE[rule.arity])


def _orderings(premises):
    if len(premises) == 2 and premises[0] != premises[1]:
        return [tuple(premises), (premises[1], premises[0])]
    return [tuple(premises)]


def enumerate_conclusions(rule: Rule, premises: list[Formula]) -> RuleOutcome:
    """All formulas one application of ``rule`` derives from the premises.

    Raises ArityMismatch on a premise-count mismatch and NotApplicable
    when no schema unifies.  Add yields an unbounded outcome.
    """
    _check_arity(rule, premises)
    if rule.unbounded:
        return RuleOutcome(None, unbounded=True)
    found: set[Formula] = set()
    for ordering in _orderings(premises):
        for schema in rule.schemas:
            binding: dict | None = {}
            for pat, prem in zip(schema.premises, ordering):
                binding = match(pat, prem, binding)
                if binding is None:
                    break
            if binding is None:
                continue
            for conc in schema.conclusions:
                found.add(instantiate(conc, binding))
    if not found:
        raise NotApplicable(f"{rule.id} does not apply to the selected statements")
    return RuleOutcome(frozenset(found))


def validate_derivation(rule: Rule, premises: list[Formula], claimed: Formula) -> bool:
    """True iff ``claimed`` is producible by one application of the rule."""
    _check_arity(rule, premises)
    if rule.unbounded:
        # Add: claimed must be premise | <anything>.
        return isinstance(claimed, Or) and claimed.left == premises[0]
    return claimed in enumerate_conclusions(rule, premises).conclusions


def applicable_rules(premises: list[Formula], catalog) -> set[Rule]:
    """Catalog rules whose arity matches and whose schema unifies."""
    out = set()
    for rule in catalog:
        if rule.arity != len(premises):
            continue
        if rule.unbounded:
            out.add(rule)
            continue
        try:
            enumerate_conclusions(rule, list(premises))
        except NotApplicable:
            continue
        out.add(rule)
    return out


def rules_by_ids(ids) -> list[Rule]:
    return [CATALOG[i] for i in ids]
