"""Next-Step and Waypoint hint selection over an interaction network.

Both hint types point at a statement to derive, never at how to derive
it.  Next-Step picks the highest-value state one add-transition away.
Waypoint pools the states 2 and 3 add-steps away and picks the one most
frequent among prior correct solutions (value, then key, break ties);
the pointed statement is the one added by the final transition of the
most-traveled shortest path into that state.  When nothing lies 2-3
steps out, Waypoint falls back to the Next-Step choice at depth 1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AlreadySolved, NoHintAvailable, NoMatch, TutorError
from .formula import Formula, parse, render
from .network import ADD, InteractionNetwork
from .proof import GIVEN, ProofState

NS = "NS"
WP = "WP"


@dataclass(frozen=True)
class Hint:
    statement: Formula
    type: str  # NS | WP
    target_state: str
    depth: int
    value: float | None = None
    source: str | None = None  # filled by the session layer


@dataclass(frozen=True)
class MatchResult:
    key: str
    dropped: int


def match_statements(
    net: InteractionNetwork, base: list[str], recent_first: list[str]
) -> MatchResult:
    """Match against the network, dropping recent statements as needed.

    ``base`` is the always-present statement set (the givens);
    ``recent_first`` holds the remaining justified statements, most
    recent first, which are dropped one at a time until a known state
    key matches.
    """
    remaining = list(recent_first)
    dropped = 0
    while True:
        key = ",".join(sorted(set(base) | set(remaining)))
        if key in net.states:
            return MatchResult(key, dropped)
        if not remaining:
            raise NoMatch("not even the givens-only state appears in the corpus")
        remaining.pop(0)
        dropped += 1


def match_state(net: InteractionNetwork, state: ProofState) -> MatchResult:
    givens = [render(n.statement) for n in state.nodes.values() if n.kind == GIVEN]
    derived = [
        n
        for n in state.justified_nodes()
        if n.kind != GIVEN and n.label is not None
    ]
    derived.sort(key=lambda n: n.label, reverse=True)
    return match_statements(net, givens, [render(n.statement) for n in derived])


def _require_values(net: InteractionNetwork) -> None:
    if not net.values:
        raise TutorError("network has no state values; run value iteration first")


def next_step_hint_at(net: InteractionNetwork, key: str) -> Hint:
    """Best statement derivable in exactly one rule application."""
    _require_values(net)
    rec = net.states.get(key)
    if rec is None:
        raise NoMatch(f"state {key!r} not in network")
    if rec.goal:
        raise AlreadySolved("the matched state already derives the conclusion")
    outs = net.add_transitions_from(key)
    if not outs:
        raise NoHintAvailable("no observed derivation leaves this state")
    best = min(outs, key=lambda t: (-net.values[t.dst], t.dst, t.statement))
    return Hint(
        statement=parse(best.statement),
        type=NS,
        target_state=best.dst,
        depth=1,
        value=net.values[best.dst],
    )


def _one_step_filter(net: InteractionNetwork, key: str):
    """Predicate: statement is derivable in one rule application from key.

    Waypoints must not point at one-step statements (those are Next-Step
    territory).  With the catalog at hand the check is kernel-exact;
    otherwise the observed direct transitions stand in.
    """
    if net.catalog_ids:
        from .search import producer

        statements = frozenset(parse(s) for s in net.states[key].statements)

        def derivable(stmt: str) -> bool:
            return producer(statements, parse(stmt), net.catalog_ids) is not None

        return derivable
    direct = {t.statement for t in net.add_transitions_from(key)}
    return direct.__contains__


def waypoint_hint_at(net: InteractionNetwork, key: str) -> Hint:
    """Most frequent correct-solution state 2-3 add-steps out."""
    _require_values(net)
    rec = net.states.get(key)
    if rec is None:
        raise NoMatch(f"state {key!r} not in network")
    if rec.goal:
        raise AlreadySolved("the matched state already derives the conclusion")

    dist = {key: 0}
    frontier = [key]
    for depth in (1, 2, 3):
        nxt = []
        for src in frontier:
            for t in net.add_transitions_from(src):
                if t.dst not in dist:
                    dist[t.dst] = depth
                    nxt.append(t.dst)
        frontier = sorted(set(nxt))

    one_step = _one_step_filter(net, key)

    def finals_for(target: str, depth: int):
        """Incoming shortest-path transitions whose statement needs >1 step."""
        return [
            t
            for t in net.transitions.values()
            if t.kind == ADD
            and t.dst == target
            and dist.get(t.src) == depth - 1
            and not one_step(t.statement)
        ]

    candidates = [
        (k, finals_for(k, d)) for k, d in dist.items() if d in (2, 3)
    ]
    candidates = [(k, f) for k, f in candidates if f]
    if not candidates:
        return next_step_hint_at(net, key)

    def rank(item):
        k, _ = item
        return (-net.states[k].correct_freq, -net.values.get(k, float("-inf")), k)

    target, finals = min(candidates, key=rank)
    depth = dist[target]
    final = min(finals, key=lambda t: (-t.freq, t.statement, t.src))
    return Hint(
        statement=parse(final.statement),
        type=WP,
        target_state=target,
        depth=depth,
        value=net.values.get(target),
    )


def next_step_hint(net: InteractionNetwork, state: ProofState) -> Hint:
    return next_step_hint_at(net, match_state(net, state).key)


def waypoint_hint(net: InteractionNetwork, state: ProofState) -> Hint:
    return waypoint_hint_at(net, match_state(net, state).key)


class HintProvider:
    """Serves condition-typed hints for live sessions from built networks."""

    def __init__(self, networks: dict[str, InteractionNetwork]):
        self.networks = networks

    def __call__(self, problem_id: str, state: ProofState, condition: str) -> Hint:
        net = self.networks.get(problem_id)
        if net is None:
            raise NoHintAvailable(f"no network for problem {problem_id!r}")
        matched = match_state(net, state)
        if condition == WP:
            return waypoint_hint_at(net, matched.key)
        return next_step_hint_at(net, matched.key)
