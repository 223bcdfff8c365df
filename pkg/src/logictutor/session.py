"""Session lifecycle: phases, the unsolicited-hint scheduler, and replay.

A session walks the curriculum intro -> pretest -> training -> posttest.
Hints exist only in training: the scheduler checks every 2-3 derivation
attempts whether a hint is still on screen and, if not and the per-attempt
budget (one third of the expert solution length) allows, injects one of
the session's condition type.  On-demand requests share the one-hint-at-
a-time rule but not the unsolicited budget.

Everything a session does is appended to its event log; ``replay``
reconstructs every attempt's proof state (re-validating each derivation
through the kernel) and the scheduler trace from the logged seeds.
"""

from __future__ import annotations

import hashlib
import random
import time
from dataclasses import dataclass, field

from .errors import (
    AlreadySolved,
    CorruptLog,
    HintAlreadyPresent,
    NoHintAvailable,
    NoMatch,
    PhaseForbidsHints,
    PhaseForbidsSkip,
    RedundantHint,
    TutorError,
)
from .events import EventLog, SessionEvent
from .formula import Formula, parse, render
from .problems import Curriculum, ProblemDef, problem_from_json
from .proof import (
    HintMeta,
    ProofState,
    StepResult,
    add_hint_node,
    attempt_step,
    cap_for_length,
    delete_node,
    new_proof,
    state_key,
)

NS = "NS"
WP = "WP"
NONE = "none"  # corpus-generation sessions run hintless
CONDITIONS = (NS, WP)


@dataclass(frozen=True)
class PhaseRules:
    hints_enabled: bool
    skip_enabled: bool


PHASE_RULES = {
    "intro": PhaseRules(False, False),
    "pretest": PhaseRules(False, False),
    "training": PhaseRules(True, True),
    "posttest": PhaseRules(False, False),
}


def scheduler_seed(sid: str, pid: str, attempt: int) -> int:
    digest = hashlib.sha256(f"{sid}:{pid}:{attempt}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


class HintScheduler:
    """Cadence and budget for unsolicited hints within one attempt."""

    def __init__(self, expert_length: int, seed: int):
        self.cap = cap_for_length(expert_length)
        self.rng = random.Random(seed)
        self.unsolicited_given = 0
        self.steps_since_check = 0
        self.next_check_at = self.rng.choice((2, 3))

    def on_step(self, hint_pending: bool) -> bool:
        """Tick one derivation attempt; True when a hint should be offered."""
        self.steps_since_check += 1
        if self.steps_since_check < self.next_check_at:
            return False
        self.steps_since_check = 0
        self.next_check_at = self.rng.choice((2, 3))
        if hint_pending:
            return False
        return self.unsolicited_given < self.cap

    def hint_given(self) -> None:
        self.unsolicited_given += 1

    def snapshot(self) -> dict:
        return {
            "cap": self.cap,
            "unsolicited_given": self.unsolicited_given,
            "steps_since_check": self.steps_since_check,
            "next_check_at": self.next_check_at,
        }


@dataclass
class StepOutcome:
    result: StepResult
    hint: "HintView | None" = None
    advanced: bool = False
    finished: bool = False


@dataclass(frozen=True)
class HintView:
    """What the tutor shows for one pointing hint."""

    statement: Formula
    type: str  # NS | WP (WP fallback hints surface as NS depth-1)
    source: str  # unsolicited | requested
    depth: int
    value: float | None = None
    target: str | None = None
    node_id: int | None = None

    def payload(self) -> dict:
        return {
            "statement": render(self.statement),
            "type": self.type,
            "source": self.source,
            "depth": self.depth,
            "value": self.value,
            "target": self.target,
            "node_id": self.node_id,
        }


class TutorSession:
    """One student working through a curriculum, fully event-logged."""

    def __init__(
        self,
        sid: str,
        student_id: str,
        condition: str,
        curriculum: Curriculum,
        log_path=None,
        hint_provider=None,
        clock=None,
    ):
        if condition not in CONDITIONS + (NONE,):
            raise TutorError(f"condition must be one of {CONDITIONS + (NONE,)}")
        self.sid = sid
        self.student_id = student_id
        self.condition = condition
        self.log = EventLog(sid, log_path)
        self.queue: list[ProblemDef] = curriculum.sequence()
        self.idx = 0
        self.attempt_no = 1
        self.hint_provider = hint_provider
        self.clock = clock or (lambda: int(time.time() * 1000))
        self.state: ProofState | None = None
        self.scheduler: HintScheduler | None = None
        self.finished = not self.queue
        if not self.finished:
            self._start_problem()

    # -- plumbing ----------------------------------------------------------

    @property
    def problem(self) -> ProblemDef:
        return self.queue[self.idx]

    @property
    def phase(self) -> str:
        return self.problem.phase

    @property
    def rules_for_phase(self) -> PhaseRules:
        return PHASE_RULES[self.phase]

    def _emit(self, kind: str, payload: dict | None = None) -> None:
        self.log.append(
            SessionEvent(
                sid=self.sid,
                pid=self.problem.id,
                seq=self.log.last_seq + 1,
                t_ms=self.clock(),
                kind=kind,
                payload=payload or {},
            )
        )

    def _start_problem(self) -> None:
        problem = self.problem
        seed = scheduler_seed(self.sid, problem.id, self.attempt_no)
        now = self.clock()
        self.state = new_proof(problem, started_at=now)
        self.scheduler = HintScheduler(problem.expert_length, seed)
        self._emit(
            "problem_start",
            {
                "problem": problem.to_json(),
                "condition": self.condition,
                "student": self.student_id,
                "attempt": self.attempt_no,
                "scheduler_seed": seed,
            },
        )

    def _advance(self) -> bool:
        self.idx += 1
        self.attempt_no = 1
        if self.idx >= len(self.queue):
            self.finished = True
            self.state = None
            return True
        self._start_problem()
        return False

    def _guard_active(self) -> None:
        if self.finished:
            raise TutorError("session already finished the curriculum")

    # -- student actions -----------------------------------------------------

    def step(self, premise_ids, rule_id: str, claimed=None) -> StepOutcome:
        """One rule application; may carry an unsolicited hint back."""
        self._guard_active()
        if isinstance(claimed, str):
            claimed = parse(claimed)
        result = attempt_step(self.state, list(premise_ids), rule_id, claimed)

        if result.kind == "needs_input":
            self._emit("apply", {"premise_ids": list(premise_ids), "rule": rule_id})
            return StepOutcome(result)

        if result.kind == "error":
            self._emit(
                "derive_error",
                {
                    "premise_ids": list(premise_ids),
                    "rule": rule_id,
                    "claimed": render(claimed) if claimed is not None else None,
                    "error": result.message,
                },
            )
        elif result.kind == "redundant":
            self._emit(
                "derive",
                {
                    "premise_ids": list(premise_ids),
                    "rule": rule_id,
                    "statement": render(result.node.statement),
                    "redundant": True,
                },
            )
        else:
            node = result.node
            self._emit(
                "derive",
                {
                    "premise_ids": list(premise_ids),
                    "rule": rule_id,
                    "statement": render(node.statement),
                    "node_id": node.id,
                    "label": node.label,
                    "justifies": node.kind if node.kind != "derived" else None,
                },
            )
            if result.justified_hint:
                self._emit(
                    "hint_justified",
                    {"node_id": node.id, "statement": render(node.statement)},
                )

        if result.completed:
            self.state.ended_at = self.clock()
            self._emit("complete", {})
            finished = self._advance()
            return StepOutcome(result, advanced=True, finished=finished)

        hint = None
        if self.rules_for_phase.hints_enabled:
            fire = self.scheduler.on_step(self.state.pending_hint() is not None)
            if fire:
                hint = self._try_emit_hint("unsolicited")
                if hint is not None:
                    self.scheduler.hint_given()
        return StepOutcome(result, hint=hint)

    def _try_emit_hint(self, source: str) -> HintView | None:
        if self.hint_provider is None:
            return None
        try:
            raw = self.hint_provider(self.problem.id, self.state, self.condition)
        except (NoHintAvailable, AlreadySolved, NoMatch):
            return None
        meta = HintMeta(raw.type, source, raw.depth, raw.value, raw.target_state)
        try:
            node_id = add_hint_node(self.state, raw.statement, meta)
        except RedundantHint:
            return None
        view = HintView(
            statement=raw.statement,
            type=raw.type,
            source=source,
            depth=raw.depth,
            value=raw.value,
            target=raw.target_state,
            node_id=node_id,
        )
        self._emit("hint_shown", view.payload())
        return view

    def request_hint(self) -> HintView:
        """On-demand hint; denied while one is pending or outside training."""
        self._guard_active()
        if not self.rules_for_phase.hints_enabled:
            raise PhaseForbidsHints(f"hints are not available during {self.phase}")
        if self.state.pending_hint() is not None:
            self._emit("hint_request_denied", {"reason": "hint already on screen"})
            raise HintAlreadyPresent("a hint is already on the screen")
        hint = self._try_emit_hint("requested")
        if hint is None:
            self._emit("hint_request_denied", {"reason": "no hint available"})
            raise NoHintAvailable("no hint is available for this state")
        return hint

    def delete(self, node_id: int) -> list[int]:
        self._guard_active()
        removed = delete_node(self.state, node_id)
        self._emit("delete", {"node_id": node_id, "removed": removed})
        return removed

    def restart(self) -> None:
        """Start the current problem over, erasing all progress."""
        self._guard_active()
        self.state.ended_at = self.clock()
        self._emit("restart", {})
        self.attempt_no += 1
        self._start_problem()

    def skip(self) -> bool:
        """Abandon the problem (training only); True if curriculum finished."""
        self._guard_active()
        if not self.rules_for_phase.skip_enabled:
            raise PhaseForbidsSkip(f"skipping is not available during {self.phase}")
        self.state.ended_at = self.clock()
        self._emit("skip", {})
        return self._advance()


# --- replay -----------------------------------------------------------------


@dataclass
class Move:
    """One state transition for network building."""

    src: str
    dst: str
    rule: str | None
    added: str | None
    removed: tuple[str, ...] = ()


@dataclass
class AttemptReplay:
    problem: ProblemDef
    condition: str
    attempt: int
    events: list[SessionEvent] = field(default_factory=list)
    state: ProofState | None = None
    keys: list[str] = field(default_factory=list)
    moves: list[Move] = field(default_factory=list)
    error_keys: list[str] = field(default_factory=list)
    completed: bool = False
    gave_up: bool = False
    scheduler_trace: list[dict] = field(default_factory=list)
    started_at: int = 0
    ended_at: int | None = None

    @property
    def phase(self) -> str:
        return self.problem.phase

    def key_sequence(self) -> list[str]:
        return list(self.keys)


def replay(events) -> list[AttemptReplay]:
    """Reconstruct every attempt of one session from its event log.

    Each derivation is re-run through the kernel; disagreement with the
    recorded outcome raises CorruptLog.
    """
    attempts: list[AttemptReplay] = []
    cur: AttemptReplay | None = None
    state: ProofState | None = None
    scheduler: HintScheduler | None = None
    last_seq = 0

    for ev in events:
        if ev.seq != last_seq + 1:
            raise CorruptLog(ev.seq, f"sequence gap after {last_seq}")
        last_seq = ev.seq
        if cur is None and ev.kind != "problem_start":
            raise CorruptLog(ev.seq, f"{ev.kind} before problem_start")

        if ev.kind == "problem_start":
            problem = problem_from_json(ev.payload["problem"])
            state = new_proof(problem, started_at=ev.t_ms)
            scheduler = HintScheduler(
                problem.expert_length, ev.payload["scheduler_seed"]
            )
            cur = AttemptReplay(
                problem=problem,
                condition=ev.payload.get("condition", ""),
                attempt=ev.payload.get("attempt", 1),
                state=state,
                started_at=ev.t_ms,
            )
            cur.events.append(ev)
            cur.keys.append(state_key(state))
            attempts.append(cur)
            continue

        cur.events.append(ev)
        ticked = False

        if ev.kind == "select":
            pass
        elif ev.kind == "apply":
            result = attempt_step(state, ev.payload["premise_ids"], ev.payload["rule"])
            if result.kind != "needs_input":
                raise CorruptLog(ev.seq, f"apply replayed as {result.kind}")
        elif ev.kind in ("derive", "derive_error"):
            claimed_text = ev.payload.get("statement") or ev.payload.get("claimed")
            claimed = parse(claimed_text) if claimed_text else None
            src = state_key(state)
            result = attempt_step(
                state, ev.payload["premise_ids"], ev.payload["rule"], claimed
            )
            # The live session never ticks the scheduler on the completing
            # step; the attempt is over.
            ticked = not result.completed
            if ev.kind == "derive_error":
                if result.kind != "error":
                    raise CorruptLog(ev.seq, f"derive_error replayed as {result.kind}")
                cur.error_keys.append(src)
            elif ev.payload.get("redundant"):
                if result.kind != "redundant":
                    raise CorruptLog(ev.seq, f"redundant replayed as {result.kind}")
            else:
                if result.kind != "derived":
                    raise CorruptLog(ev.seq, f"derive replayed as {result.kind}")
                if result.node.id != ev.payload.get("node_id"):
                    raise CorruptLog(
                        ev.seq,
                        f"node id {result.node.id} != logged {ev.payload.get('node_id')}",
                    )
                dst = state_key(state)
                cur.keys.append(dst)
                cur.moves.append(
                    Move(src, dst, ev.payload["rule"], ev.payload["statement"])
                )
        elif ev.kind == "delete":
            src = state_key(state)
            target = ev.payload["node_id"]
            removed_stmts = tuple(
                render(state.nodes[rid].statement)
                for rid in ev.payload["removed"]
                if rid in state.nodes and state.nodes[rid].justified
            )
            removed = delete_node(state, target)
            if removed != ev.payload["removed"]:
                raise CorruptLog(
                    ev.seq, f"delete removed {removed} != logged {ev.payload['removed']}"
                )
            dst = state_key(state)
            if dst != src:
                cur.keys.append(dst)
                cur.moves.append(Move(src, dst, None, None, removed=removed_stmts))
        elif ev.kind == "hint_shown":
            meta = HintMeta(
                ev.payload["type"],
                ev.payload["source"],
                ev.payload.get("depth", 1),
                ev.payload.get("value"),
                ev.payload.get("target"),
            )
            add_hint_node(state, parse(ev.payload["statement"]), meta)
            if ev.payload["source"] == "unsolicited":
                scheduler.hint_given()
                if scheduler.unsolicited_given > scheduler.cap:
                    raise CorruptLog(ev.seq, "unsolicited hints exceed the cap")
        elif ev.kind == "hint_justified":
            node = state.nodes.get(ev.payload["node_id"])
            if node is None or not node.justified:
                raise CorruptLog(ev.seq, "hint_justified without a justified node")
        elif ev.kind == "hint_request_denied":
            pass
        elif ev.kind == "complete":
            if not state.is_complete():
                raise CorruptLog(ev.seq, "complete event on an unfinished proof")
            cur.completed = True
            cur.ended_at = ev.t_ms
            state.ended_at = ev.t_ms
        elif ev.kind in ("restart", "skip"):
            cur.gave_up = True
            cur.ended_at = ev.t_ms
            state.ended_at = ev.t_ms
        else:
            raise CorruptLog(ev.seq, f"unhandled kind {ev.kind!r}")

        # The live session runs the scheduler only where hints exist.
        if ticked and PHASE_RULES[cur.problem.phase].hints_enabled:
            scheduler.on_step(state.pending_hint() is not None)
        cur.scheduler_trace.append(scheduler.snapshot())

    return attempts
