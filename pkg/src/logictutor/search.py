"""Bounded forward/backward search over the rule catalog.

The simulator needs two queries: every statement derivable in one rule
application from a statement set (to explore), and a shortest derivation
path (depth <= 3, the Waypoint maximum) from the current statements to a
hint statement (to follow hints).  Both are memoized aggressively; the
same problems are replayed thousands of times during corpus generation
and acceptance runs, and statement sets recur constantly.

Add (unbounded disjunct introduction) is never enumerated forward;
instead, backward analysis proposes the ground disjunction a later step
needs (say ``P|R`` to feed a Constructive Dilemma) and checks whether
Add or a finite rule can supply it.
"""

from __future__ import annotations

from .errors import NotApplicable
from .formula import Atom, Formula, Not, Or, render
from .rules import CATALOG, enumerate_conclusions, instantiate, match

# (frozenset of statements, catalog ids) -> {conclusion: (premises, rule_id)}
_one_step_cache: dict = {}
# (frozenset, target, catalog ids, depth) -> path or None
_path_cache: dict = {}

Witness = tuple[tuple[Formula, ...], str]
Step = tuple[tuple[Formula, ...], str, Formula]


def clear_caches() -> None:
    _one_step_cache.clear()
    _path_cache.clear()


def _finite_rules(catalog_ids):
    return [CATALOG[r] for r in catalog_ids if not CATALOG[r].unbounded]


def one_step_conclusions(
    statements: frozenset[Formula], catalog_ids: tuple[str, ...]
) -> dict[Formula, Witness]:
    """Everything derivable in one application of a finite rule."""
    key = (statements, catalog_ids)
    cached = _one_step_cache.get(key)
    if cached is not None:
        return cached
    stmts = sorted(statements, key=render)
    out: dict[Formula, Witness] = {}
    for rule in _finite_rules(catalog_ids):
        if rule.arity == 1:
            for s in stmts:
                try:
                    concs = enumerate_conclusions(rule, [s]).conclusions
                except NotApplicable:
                    continue
                for c in sorted(concs, key=render):
                    out.setdefault(c, ((s,), rule.id))
        else:
            for i, a in enumerate(stmts):
                for b in stmts[i + 1 :]:
                    try:
                        concs = enumerate_conclusions(rule, [a, b]).conclusions
                    except NotApplicable:
                        continue
                    for c in sorted(concs, key=render):
                        out.setdefault(c, ((a, b), rule.id))
    _one_step_cache[key] = out
    return out


def producer(
    statements: frozenset[Formula], target: Formula, catalog_ids: tuple[str, ...]
) -> Witness | None:
    """A single rule application from ``statements`` that yields ``target``.

    Goal-directed: unify the target against each conclusion pattern, then
    look for premises completing the schema.  Cheap enough to run inside
    search loops.
    """
    stmts = sorted(statements, key=render)
    for rid in catalog_ids:
        rule = CATALOG[rid]
        if rule.unbounded:
            if isinstance(target, Or) and target.left in statements:
                return ((target.left,), rid)
            continue
        for schema in rule.schemas:
            for cpat in schema.conclusions:
                b0 = match(cpat, target, {})
                if b0 is None:
                    continue
                if rule.arity == 1:
                    for s in stmts:
                        if match(schema.premises[0], s, b0) is not None:
                            return ((s,), rid)
                else:
                    for a in stmts:
                        b1 = match(schema.premises[0], a, b0)
                        if b1 is None:
                            continue
                        for b in stmts:
                            if b == a:
                                continue
                            if match(schema.premises[1], b, b1) is not None:
                                return ((a, b), rid)
    return None


def _instantiate_if_ground(pattern: Formula, binding: dict) -> Formula | None:
    if isinstance(pattern, Atom):
        if pattern.name.islower():
            return binding.get(pattern.name)
        return pattern
    if isinstance(pattern, Not):
        child = _instantiate_if_ground(pattern.child, binding)
        return Not(child) if child is not None else None
    left = _instantiate_if_ground(pattern.left, binding)
    right = _instantiate_if_ground(pattern.right, binding)
    if left is None or right is None:
        return None
    return type(pattern)(left, right)


def missing_premises(
    statements: frozenset[Formula], target: Formula, catalog_ids: tuple[str, ...]
) -> list[tuple[Formula, tuple[Formula, ...], str]]:
    """Ground statements that would complete a one-step derivation of target.

    Each entry is (missing premise, premises already present, rule id):
    deriving the missing formula makes the rule application possible.
    """
    out = []
    seen = set()
    stmts = sorted(statements, key=render)
    for rid in catalog_ids:
        rule = CATALOG[rid]
        if rule.unbounded:
            continue
        for schema in rule.schemas:
            for cpat in schema.conclusions:
                b0 = match(cpat, target, {})
                if b0 is None:
                    continue
                if rule.arity == 1:
                    m = _instantiate_if_ground(schema.premises[0], b0)
                    if m is not None and m not in statements and (m, rid) not in seen:
                        seen.add((m, rid))
                        out.append((m, (), rid))
                    continue
                for present_idx in (0, 1):
                    missing_idx = 1 - present_idx
                    for s in stmts:
                        b1 = match(schema.premises[present_idx], s, b0)
                        if b1 is None:
                            continue
                        m = _instantiate_if_ground(schema.premises[missing_idx], b1)
                        if (
                            m is not None
                            and m != s
                            and m not in statements
                            and (m, s, rid) not in seen
                        ):
                            seen.add((m, s, rid))
                            out.append((m, (s,), rid))
    return out


def find_path(
    statements: frozenset[Formula],
    target: Formula,
    catalog_ids: tuple[str, ...],
    max_depth: int = 3,
) -> list[Step] | None:
    """A shortest derivation of ``target`` in at most ``max_depth`` steps.

    Returns [(premises, rule, conclusion), ...] or None.
    """
    if target in statements:
        return []
    key = (statements, target, catalog_ids, max_depth)
    if key in _path_cache:
        return _path_cache[key]
    path = _find_path(statements, target, catalog_ids, max_depth)
    _path_cache[key] = path
    return path


def _find_path(statements, target, catalog_ids, max_depth):
    direct = producer(statements, target, catalog_ids)
    if direct is not None:
        return [(direct[0], direct[1], target)]
    if max_depth <= 1:
        return None

    frontier = one_step_conclusions(statements, catalog_ids)
    middles = sorted(
        (c for c in frontier if c not in statements and c != target), key=render
    )

    # Depth 2, forward: one finite step, then a producer for the target.
    for s1 in middles:
        w = producer(statements | {s1}, target, catalog_ids)
        if w is not None:
            p1, r1 = frontier[s1]
            return [(p1, r1, s1), (w[0], w[1], target)]
    # Depth 2, backward: the final step lacks one ground premise that Add
    # can introduce (forward enumeration never proposes disjunctions).
    needs = missing_premises(statements, target, catalog_ids)
    for m, others, rid in needs:
        if isinstance(m, Or) and m.left in statements:
            return [
                ((m.left,), "Add", m),
                (others + (m,), rid, target),
            ]
    if max_depth <= 2:
        return None

    # Depth 3, backward middle: a forward step, then the missing ground
    # premise of the final step, supplied by any rule (Add included).
    for s1 in middles:
        ext = statements | {s1}
        for m, others, rid in missing_premises(ext, target, catalog_ids):
            w2 = producer(ext, m, catalog_ids)
            if w2 is not None:
                p1, r1 = frontier[s1]
                return [
                    (p1, r1, s1),
                    (w2[0], w2[1], m),
                    (others + (m,), rid, target),
                ]
    # Depth 3, forward fallback: complete over finite rules.
    for s1 in middles:
        ext = statements | {s1}
        second = one_step_conclusions(frozenset(ext), catalog_ids)
        for s2 in sorted(second, key=render):
            if s2 in ext or s2 == target:
                continue
            w = producer(ext | {s2}, target, catalog_ids)
            if w is not None:
                p1, r1 = frontier[s1]
                p2, r2 = second[s2]
                return [(p1, r1, s1), (p2, r2, s2), (w[0], w[1], target)]
    return None


def add_candidates(
    statements: frozenset[Formula], pool: list[Formula]
) -> list[tuple[Formula, Witness]]:
    """Disjunction introductions worth exploring: premise | pool formula."""
    out = []
    for s in sorted(statements, key=render):
        for d in pool:
            cand = Or(s, d)
            if cand not in statements and cand != s:
                out.append((cand, ((s,), "Add")))
    return out
