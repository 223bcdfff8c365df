"""Append-only session event log.

One event per line of JSON with exactly the fields sid, pid, seq, t_ms,
kind, payload; UTF-8, newline terminated.  This JSONL stream is the
ingestion contract for network building and analytics.  Sequence numbers
are strictly increasing per session, and complete/skip/restart close the
current problem attempt: the only event allowed afterwards is the
problem_start of the next attempt.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CorruptLog, SequenceGap, TerminalViolation, WriteFailure

KINDS = (
    "problem_start",
    "select",
    "apply",
    "derive",
    "derive_error",
    "delete",
    "hint_shown",
    "hint_justified",
    "hint_request_denied",
    "restart",
    "skip",
    "complete",
)

TERMINAL_KINDS = ("restart", "skip", "complete")


@dataclass(frozen=True)
class SessionEvent:
    sid: str
    pid: str
    seq: int
    t_ms: int
    kind: str
    payload: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "sid": self.sid,
                "pid": self.pid,
                "seq": self.seq,
                "t_ms": self.t_ms,
                "kind": self.kind,
                "payload": self.payload,
            },
            sort_keys=True,
            separators=(",", ":"),
        )


def event_from_json(line: str, where: str = "") -> SessionEvent:
    try:
        data = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorruptLog("?", f"bad JSON: {exc}", where) from exc
    missing = {"sid", "pid", "seq", "t_ms", "kind", "payload"} - set(data)
    if missing:
        raise CorruptLog(data.get("seq", "?"), f"missing fields {sorted(missing)}", where)
    if data["kind"] not in KINDS:
        raise CorruptLog(data["seq"], f"unknown kind {data['kind']!r}", where)
    return SessionEvent(
        sid=data["sid"],
        pid=data["pid"],
        seq=int(data["seq"]),
        t_ms=int(data["t_ms"]),
        kind=data["kind"],
        payload=data["payload"],
    )


class EventLog:
    """Per-session append-only event sequence, optionally file-backed."""

    def __init__(self, sid: str, path: str | Path | None = None):
        self.sid = sid
        self.events: list[SessionEvent] = []
        self._path = Path(path) if path else None
        self._terminal_open = False  # attempt closed, awaiting problem_start

    @property
    def last_seq(self) -> int:
        return self.events[-1].seq if self.events else 0

    def append(self, event: SessionEvent) -> None:
        if event.sid != self.sid:
            raise SequenceGap(f"event sid {event.sid!r} != log sid {self.sid!r}")
        expected = self.last_seq + 1
        if event.seq != expected:
            raise SequenceGap(f"expected seq {expected}, got {event.seq}")
        if self._terminal_open and event.kind != "problem_start":
            raise TerminalViolation(
                f"attempt already closed; got {event.kind!r} (seq {event.seq})"
            )
        if event.kind in TERMINAL_KINDS:
            self._terminal_open = True
        elif event.kind == "problem_start":
            self._terminal_open = False
        self.events.append(event)
        if self._path is not None:
            try:
                with open(self._path, "a", encoding="utf-8") as fh:
                    fh.write(event.to_json() + "\n")
            except OSError as exc:
                raise WriteFailure(str(exc)) from exc


def write_jsonl(events, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in events:
            fh.write(e.to_json() + "\n")


def read_jsonl(path: str | Path) -> list[SessionEvent]:
    """Read a JSONL corpus; errors carry the offending file:line."""
    out = []
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            out.append(event_from_json(line, where=f"{path}:{lineno}"))
    return out


def group_by_session(events) -> dict[str, list[SessionEvent]]:
    """Split a mixed event stream into per-session sequences (seq order)."""
    sessions: dict[str, list[SessionEvent]] = {}
    for e in events:
        sessions.setdefault(e.sid, []).append(e)
    for sid, evs in sessions.items():
        evs.sort(key=lambda e: e.seq)
    return sessions
