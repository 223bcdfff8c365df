"""Interaction networks: historical attempts folded into a state graph.

Every attempt contributes a walk over canonical state keys; adding a
statement is an add-transition, deletions are remove-transitions (a
cascade delete is decomposed into single-statement removals so every
edge changes the state by exactly one statement).  States and edges
carry traversal frequencies; attempts that ended in completion also
bump the correct-solution frequency of every state they visited, and
errors are attributed to the state where they happened.

Snapshots are a line-based, tab-separated text format with sorted
records so identical corpora produce byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import BadSnapshot, EmptyCorpus
from .events import group_by_session
from .proof import CorpusNodeStats, necessary_nodes
from .session import AttemptReplay, Move, replay

ADD = "add"
DEL = "del"

SNAPSHOT_HEADER = "network-snapshot v1"


@dataclass
class StateRecord:
    key: str
    visits: int = 0
    correct_freq: int = 0
    goal: bool = False
    errors: int = 0

    @property
    def statements(self) -> tuple[str, ...]:
        return tuple(self.key.split(",")) if self.key else ()


@dataclass
class Transition:
    src: str
    dst: str
    kind: str  # add | del
    rule: str | None
    statement: str  # the added or removed statement
    freq: int = 0

    @property
    def identity(self):
        return (self.src, self.dst, self.kind, self.rule or "", self.statement)


@dataclass
class InteractionNetwork:
    problem_id: str
    conclusion: str
    initial_key: str
    catalog_ids: tuple[str, ...] = ()
    states: dict[str, StateRecord] = field(default_factory=dict)
    transitions: dict[tuple, Transition] = field(default_factory=dict)
    values: dict[str, float] = field(default_factory=dict)

    def state(self, key: str) -> StateRecord:
        if key not in self.states:
            self.states[key] = StateRecord(
                key, goal=self.conclusion in key.split(",")
            )
        return self.states[key]

    def bump_transition(
        self, src: str, dst: str, kind: str, rule: str | None, statement: str
    ) -> Transition:
        t = Transition(src, dst, kind, rule, statement)
        existing = self.transitions.get(t.identity)
        if existing is None:
            self.transitions[t.identity] = t
            existing = t
        existing.freq += 1
        return existing

    def add_transitions_from(self, key: str) -> list[Transition]:
        out = [t for t in self.transitions.values() if t.src == key and t.kind == ADD]
        out.sort(key=lambda t: (t.dst, t.statement, t.rule or ""))
        return out

    def sorted_states(self) -> list[StateRecord]:
        return [self.states[k] for k in sorted(self.states)]

    def sorted_transitions(self) -> list[Transition]:
        return sorted(self.transitions.values(), key=lambda t: t.identity)


def _decompose_delete(move: Move) -> list[tuple[str, str, str]]:
    """Split a cascade removal into (src, dst, removed-statement) hops.

    Dependents disappear before their supports, so the statements are
    peeled off in reverse creation order (the order recorded in the move).
    """
    src_set = set(move.src.split(",")) if move.src else set()
    hops = []
    cur = src_set
    for stmt in reversed(move.removed):
        nxt = cur - {stmt}
        hops.append((",".join(sorted(cur)), ",".join(sorted(nxt)), stmt))
        cur = nxt
    return hops


def build_network(events_or_attempts, problem_id: str) -> InteractionNetwork:
    """Fold all attempts at one problem into an interaction network."""
    attempts = _attempts_for(events_or_attempts, problem_id)
    if not attempts:
        raise EmptyCorpus(f"no attempts for problem {problem_id!r}")

    conclusion = None
    initial_key = None
    net: InteractionNetwork | None = None
    for attempt in attempts:
        if net is None:
            from .formula import render

            conclusion = render(attempt.problem.conclusion)
            initial_key = attempt.keys[0]
            net = InteractionNetwork(
                problem_id, conclusion, initial_key, attempt.problem.catalog_ids
            )
        visited = [attempt.keys[0]]
        net.state(attempt.keys[0]).visits += 1
        for move in attempt.moves:
            if move.removed:
                for src, dst, stmt in _decompose_delete(move):
                    net.bump_transition(src, dst, DEL, None, stmt)
                    net.state(dst).visits += 1
                    visited.append(dst)
            else:
                net.bump_transition(move.src, move.dst, ADD, move.rule, move.added)
                net.state(move.dst).visits += 1
                visited.append(move.dst)
        for key in attempt.error_keys:
            net.state(key).errors += 1
        if attempt.completed:
            for key in visited:
                net.state(key).correct_freq += 1
    return net


def _attempts_for(events_or_attempts, problem_id: str) -> list[AttemptReplay]:
    items = list(events_or_attempts)
    if items and isinstance(items[0], AttemptReplay):
        return [a for a in items if a.problem.id == problem_id]
    attempts = []
    for sid, evs in sorted(group_by_session(items).items()):
        attempts.extend(a for a in replay(evs) if a.problem.id == problem_id)
    return attempts


def corpus_node_stats(events_or_attempts, problem_id: str) -> CorpusNodeStats:
    """Necessity fraction of each statement across correct solutions."""
    from .formula import render

    attempts = _attempts_for(events_or_attempts, problem_id)
    correct = [a for a in attempts if a.completed]
    counts: dict[str, int] = {}
    for a in correct:
        needed = necessary_nodes(a.state)
        for nid in needed:
            stmt = render(a.state.nodes[nid].statement)
            counts[stmt] = counts.get(stmt, 0) + 1
    total = len(correct)
    fractions = {s: c / total for s, c in counts.items()} if total else {}
    return CorpusNodeStats(problem_id, total, fractions)


# --- snapshot io -------------------------------------------------------------


def _fmt_value(v: float | None) -> str:
    return "-" if v is None else repr(v)


def write_snapshot(net: InteractionNetwork, path: str | Path) -> None:
    lines = [SNAPSHOT_HEADER]
    lines.append(f"problem\t{net.problem_id}")
    lines.append(f"conclusion\t{net.conclusion}")
    lines.append(f"initial\t{net.initial_key}")
    lines.append(f"catalog\t{','.join(net.catalog_ids)}")
    for s in net.sorted_states():
        lines.append(
            "state\t{key}\t{goal}\t{visits}\t{correct}\t{errors}\t{value}".format(
                key=s.key,
                goal=int(s.goal),
                visits=s.visits,
                correct=s.correct_freq,
                errors=s.errors,
                value=_fmt_value(net.values.get(s.key)),
            )
        )
    for t in net.sorted_transitions():
        lines.append(
            f"trans\t{t.src}\t{t.dst}\t{t.kind}\t{t.rule or '-'}\t{t.statement}\t{t.freq}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_snapshot(path: str | Path) -> InteractionNetwork:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != SNAPSHOT_HEADER:
        raise BadSnapshot(f"{path}: not a {SNAPSHOT_HEADER!r} file")
    meta = {}
    net: InteractionNetwork | None = None
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        tag = parts[0]
        try:
            if tag in ("problem", "conclusion", "initial", "catalog"):
                meta[tag] = parts[1] if len(parts) > 1 else ""
                if {"problem", "conclusion", "initial", "catalog"} <= set(meta) and net is None:
                    catalog = tuple(c for c in meta["catalog"].split(",") if c)
                    net = InteractionNetwork(
                        meta["problem"], meta["conclusion"], meta["initial"], catalog
                    )
            elif tag == "state":
                key, goal, visits, correct, errors, value = parts[1:7]
                rec = StateRecord(
                    key, int(visits), int(correct), bool(int(goal)), int(errors)
                )
                net.states[key] = rec
                if value != "-":
                    net.values[key] = float(value)
            elif tag == "trans":
                src, dst, kind, rule, statement, freq = parts[1:7]
                t = Transition(
                    src, dst, kind, None if rule == "-" else rule, statement, int(freq)
                )
                net.transitions[t.identity] = t
            else:
                raise ValueError(f"unknown record {tag!r}")
        except (IndexError, ValueError, AttributeError) as exc:
            raise BadSnapshot(f"{path}:{lineno}: {exc}") from exc
    if net is None:
        raise BadSnapshot(f"{path}: missing problem/conclusion/initial records")
    return net
