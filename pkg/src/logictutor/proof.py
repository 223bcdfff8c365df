"""Live proof state: givens, derived nodes, hint nodes, deletion, coloring.

A proof is a DAG.  Givens are roots; every derived node records its
justification (rule + 1-2 parent nodes), so the edges mirror the
justifications exactly.  The conclusion starts as an unjustified node
(the on-screen ``?``); the proof is complete once it is justified.
Hint nodes also start unjustified and become justified when a student
derivation lands on their statement.  Once complete, a state is frozen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import (
    CompletedAttempt,
    HintAlreadyPresent,
    Incomplete,
    InvalidProblem,
    MissingStats,
    ProtectedNode,
    RedundantHint,
    RuleNotAvailable,
    UnknownNode,
)
from .errors import ArityMismatch, NotApplicable
from .formula import Formula, Or, render
from .problems import ProblemDef
from .rules import CATALOG, Rule, enumerate_conclusions

GIVEN = "given"
DERIVED = "derived"
CONCLUSION = "conclusion"
HINT = "hint"

GRAY = "gray"
YELLOW = "yellow"
GREEN = "green"

DEFAULT_GREEN_THRESHOLD = 0.3


@dataclass(frozen=True)
class Justification:
    rule_id: str
    parent_ids: tuple[int, ...]


@dataclass
class HintMeta:
    type: str  # "NS" | "WP"
    source: str  # "unsolicited" | "requested"
    depth: int = 1
    value: float | None = None
    target: str | None = None


@dataclass
class ProofNode:
    id: int
    statement: Formula
    kind: str
    justification: Justification | None = None
    label: int | None = None
    hint_meta: HintMeta | None = None

    @property
    def justified(self) -> bool:
        if self.kind == GIVEN:
            return True
        return self.justification is not None


@dataclass
class StepResult:
    """Outcome of one rule application attempt.

    kind is one of ``derived`` (node added or a hint/conclusion node
    justified), ``needs_input`` (several or unboundedly many conclusions
    are possible and none was claimed), ``redundant`` (valid derivation
    duplicating an already-justified statement) or ``error``.
    """

    kind: str
    node: ProofNode | None = None
    message: str = ""
    options: tuple[Formula, ...] | None = None
    justified_hint: bool = False
    completed: bool = False


@dataclass
class ProofState:
    problem: ProblemDef
    nodes: dict[int, ProofNode] = field(default_factory=dict)
    error_count: int = 0
    step_count: int = 0
    started_at: int = 0
    ended_at: int | None = None
    _next_id: int = 1
    _next_label: int = 1

    # -- views -------------------------------------------------------------

    def node(self, node_id: int) -> ProofNode:
        if node_id not in self.nodes:
            raise UnknownNode(f"no node with id {node_id}")
        return self.nodes[node_id]

    @property
    def conclusion_node(self) -> ProofNode:
        return next(n for n in self.nodes.values() if n.kind == CONCLUSION)

    def justified_nodes(self) -> list[ProofNode]:
        return [n for n in self.nodes.values() if n.justified]

    def justified_statements(self) -> list[Formula]:
        return [n.statement for n in self.justified_nodes()]

    def pending_hint(self) -> ProofNode | None:
        """The unjustified hint node, if one is on screen."""
        for n in self.nodes.values():
            if n.kind == HINT and not n.justified:
                return n
        return None

    def find_justified(self, statement: Formula) -> ProofNode | None:
        for n in self.nodes.values():
            if n.justified and n.statement == statement:
                return n
        return None

    def edges(self) -> list[tuple[int, int]]:
        """Justification arrows as (parent, child) pairs."""
        out = []
        for n in self.nodes.values():
            if n.justification:
                out.extend((p, n.id) for p in n.justification.parent_ids)
        return out

    # -- mutation ------------------------------------------------------------

    def _add_node(self, node: ProofNode) -> ProofNode:
        self.nodes[node.id] = node
        self._next_id = node.id + 1
        return node

    def _assign_label(self, node: ProofNode) -> None:
        node.label = self._next_label
        self._next_label += 1

    def _guard_frozen(self) -> None:
        if self.is_complete():
            raise CompletedAttempt("the proof is complete; state is frozen")

    def is_complete(self) -> bool:
        return self.conclusion_node.justified


def new_proof(problem: ProblemDef, started_at: int = 0) -> ProofState:
    """Fresh state: given nodes plus the unjustified conclusion node."""
    if not problem.givens:
        raise InvalidProblem("a problem needs at least one given")
    if problem.conclusion in problem.givens:
        raise InvalidProblem("conclusion already among the givens")
    state = ProofState(problem=problem, started_at=started_at)
    for g in problem.givens:
        node = state._add_node(ProofNode(state._next_id, g, GIVEN))
        state._assign_label(node)
    state._add_node(ProofNode(state._next_id, problem.conclusion, CONCLUSION))
    return state


def attempt_step(
    state: ProofState,
    premise_ids: list[int],
    rule: Rule | str,
    claimed: Formula | None = None,
) -> StepResult:
    """Apply a rule to premise nodes; the tutor's three responses.

    A single possible conclusion is derived automatically; several (or
    an unbounded family) prompt for the claimed statement; anything
    invalid is recorded as an error.  Every call counts as a step.
    """
    state._guard_frozen()
    if isinstance(rule, str):
        if rule not in CATALOG:
            raise RuleNotAvailable(f"unknown rule {rule!r}")
        rule = CATALOG[rule]
    if rule.id not in state.problem.catalog_ids:
        raise RuleNotAvailable(f"{rule.id} is not enabled for this problem")
    premises = []
    for pid in premise_ids:
        node = state.node(pid)
        if not node.justified:
            raise UnknownNode(f"node {pid} is not justified and cannot be a premise")
        premises.append(node.statement)
    state.step_count += 1

    try:
        outcome = enumerate_conclusions(rule, premises)
    except (ArityMismatch, NotApplicable) as exc:
        state.error_count += 1
        return StepResult("error", message=str(exc))

    if claimed is None:
        if outcome.unbounded:
            return StepResult("needs_input", options=None)
        conclusions = sorted(outcome.conclusions, key=render)
        if len(conclusions) > 1:
            return StepResult("needs_input", options=tuple(conclusions))
        claimed = conclusions[0]
    else:
        if outcome.unbounded:
            ok = isinstance(claimed, Or) and claimed.left == premises[0]
        else:
            ok = claimed in outcome.conclusions
        if not ok:
            state.error_count += 1
            return StepResult(
                "error",
                message=f"{render(claimed)} does not follow from the selected "
                f"statements by {rule.id}",
            )

    return _incorporate(state, premise_ids, rule, claimed)


def _incorporate(
    state: ProofState, premise_ids: list[int], rule: Rule, statement: Formula
) -> StepResult:
    justification = Justification(rule.id, tuple(premise_ids))
    conclusion = state.conclusion_node
    if statement == conclusion.statement and not conclusion.justified:
        conclusion.justification = justification
        state._assign_label(conclusion)
        return StepResult("derived", node=conclusion, completed=True)

    hint = state.pending_hint()
    if hint is not None and hint.statement == statement:
        hint.justification = justification
        state._assign_label(hint)
        return StepResult("derived", node=hint, justified_hint=True)

    existing = state.find_justified(statement)
    if existing is not None:
        return StepResult(
            "redundant",
            node=existing,
            message=f"{render(statement)} is already on the screen",
        )

    node = state._add_node(ProofNode(state._next_id, statement, DERIVED, justification))
    state._assign_label(node)
    return StepResult("derived", node=node)


def add_hint_node(state: ProofState, statement: Formula, meta: HintMeta) -> int:
    """Place a pointing hint as an unjustified ``?`` node; returns its id."""
    state._guard_frozen()
    if state.pending_hint() is not None:
        raise HintAlreadyPresent("a hint is already on the screen")
    if state.find_justified(statement) is not None:
        raise RedundantHint(f"{render(statement)} is already justified")
    if statement == state.conclusion_node.statement:
        raise RedundantHint("the conclusion is already the visible goal")
    node = state._add_node(ProofNode(state._next_id, statement, HINT, hint_meta=meta))
    return node.id


def delete_node(state: ProofState, node_id: int) -> list[int]:
    """Delete a node and cascade through dependent justifications.

    Derived dependents are removed; a justified hint node that loses its
    parents reverts to ``?`` (unless another hint is already pending, in
    which case the stale hint is removed too).  Returns the removed ids.
    """
    state._guard_frozen()
    node = state.node(node_id)
    if node.kind in (GIVEN, CONCLUSION):
        raise ProtectedNode(f"{node.kind} nodes cannot be deleted")

    removed: set[int] = set()
    reverted: list[int] = []
    processed: set[int] = set()
    queue = [node_id]
    while queue:
        target = queue.pop()
        if target in processed:
            continue
        processed.add(target)
        node = state.nodes[target]
        if target == node_id or node.kind != HINT:
            removed.add(target)
        else:
            # Justified hint losing its support: back to a `?` node, but
            # anything derived from it is no longer grounded.
            node.justification = None
            node.label = None
            reverted.append(target)
        for other in state.nodes.values():
            if other.id in processed or other.justification is None:
                continue
            if target in other.justification.parent_ids:
                queue.append(other.id)
    # Reverted hints may coexist with a pending one; keep a single `?`
    # hint on screen (the pending one wins, else the most recent revert).
    pending = [
        n.id
        for n in state.nodes.values()
        if n.kind == HINT and not n.justified and n.id not in removed
    ]
    if len(pending) > 1:
        keep = [nid for nid in pending if nid not in reverted] or [max(pending)]
        removed.update(nid for nid in pending if nid != keep[0])
    for rid in removed:
        state.nodes.pop(rid, None)
    return sorted(removed)


def is_complete(state: ProofState) -> bool:
    return state.is_complete()


def necessary_nodes(state: ProofState) -> set[int]:
    """Nodes on a justification path from the givens to the conclusion.

    Since every node has exactly one justification, these are exactly the
    nodes whose removal (with cascade) would disconnect the conclusion.
    """
    if not state.is_complete():
        raise Incomplete("necessity is defined on completed proofs only")
    needed: set[int] = set()
    stack = [state.conclusion_node.id]
    while stack:
        nid = stack.pop()
        if nid in needed:
            continue
        needed.add(nid)
        just = state.nodes[nid].justification
        if just:
            stack.extend(just.parent_ids)
    return needed


@dataclass
class CorpusNodeStats:
    """Per-problem historical necessity fractions, keyed by statement string."""

    problem_id: str
    correct_solutions: int
    necessary_fraction: dict[str, float] = field(default_factory=dict)


def color_nodes(
    state: ProofState,
    stats: CorpusNodeStats,
    green_threshold: float = DEFAULT_GREEN_THRESHOLD,
) -> dict[int, str]:
    """Color nodes by how often their statement was necessary historically.

    Never necessary -> gray; necessary in at least ``green_threshold`` of
    the correct historical solutions -> green; in between -> yellow.
    """
    if stats.problem_id != state.problem.id:
        raise MissingStats(
            f"stats are for {stats.problem_id!r}, state is {state.problem.id!r}"
        )
    colors = {}
    for n in state.nodes.values():
        frac = stats.necessary_fraction.get(render(n.statement), 0.0)
        if frac <= 0.0:
            colors[n.id] = GRAY
        elif frac >= green_threshold:
            colors[n.id] = GREEN
        else:
            colors[n.id] = YELLOW
    return colors


def state_key(state: ProofState) -> str:
    """Canonical snapshot key: sorted unique statements of justified nodes."""
    statements = sorted({render(n.statement) for n in state.justified_nodes()})
    return ",".join(statements)


def key_statements(key: str) -> tuple[str, ...]:
    """Split a canonical key back into its statement strings."""
    return tuple(key.split(",")) if key else ()


def cap_for_length(expert_length: int) -> int:
    """Unsolicited-hint budget per attempt: one third of the expert length."""
    return math.ceil(expert_length / 3)
