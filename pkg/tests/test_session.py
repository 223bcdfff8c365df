"""Session lifecycle, the hint scheduler, event log discipline, replay."""

import random

import pytest

from logictutor.errors import (
    CorruptLog,
    HintAlreadyPresent,
    NoHintAvailable,
    PhaseForbidsHints,
    PhaseForbidsSkip,
    SequenceGap,
    TerminalViolation,
)
from logictutor.events import EventLog, SessionEvent, read_jsonl, write_jsonl
from logictutor.formula import parse
from logictutor.hints import Hint
from logictutor.proof import cap_for_length, state_key
from logictutor.session import HintScheduler, TutorSession, replay

from conftest import (
    CHAIN_PROBLEM,
    FIG_PROBLEM,
    make_problem,
    play_script,
    scripted_session,
    single_curriculum,
)


def fixed_hint_provider(statements):
    """Serves the first listed statement the student has not derived yet."""

    def provider(problem_id, state, condition):
        for text in statements:
            f = parse(text)
            if state.find_justified(f) is None and f != state.problem.conclusion:
                return Hint(
                    statement=f,
                    type="NS" if condition != "WP" else "WP",
                    target_state="",
                    depth=1 if condition != "WP" else 2,
                )
        raise NoHintAvailable("out of scripted hints")

    return provider


# --- event log ---------------------------------------------------------------


def ev(seq, kind, sid="s", pid="p", payload=None):
    return SessionEvent(sid, pid, seq, 1000 + seq, kind, payload or {})


def test_append_enforces_sequence():
    log = EventLog("s")
    log.append(ev(1, "problem_start"))
    log.append(ev(2, "derive"))
    with pytest.raises(SequenceGap):
        log.append(ev(4, "derive"))


def test_terminal_violation():
    log = EventLog("s")
    log.append(ev(1, "problem_start"))
    log.append(ev(2, "complete"))
    with pytest.raises(TerminalViolation):
        log.append(ev(3, "derive"))
    log.append(ev(3, "problem_start"))  # next attempt is fine


def test_jsonl_round_trip(tmp_path):
    events = scripted_session(CHAIN_PROBLEM).log.events
    path = tmp_path / "log.jsonl"
    write_jsonl(events, path)
    assert read_jsonl(path) == list(events)


def test_write_failure_surfaces(tmp_path):
    log = EventLog("s", tmp_path / "missing-dir" / "log.jsonl")
    from logictutor.errors import WriteFailure

    with pytest.raises(WriteFailure):
        log.append(ev(1, "problem_start"))


def test_truncated_file_is_corrupt(tmp_path):
    events = scripted_session(CHAIN_PROBLEM).log.events
    path = tmp_path / "log.jsonl"
    write_jsonl(events, path)
    data = path.read_bytes()
    path.write_bytes(data[: len(data) - 25])  # cut mid-record
    with pytest.raises(CorruptLog) as exc:
        read_jsonl(path)
    assert "log.jsonl" in exc.value.where


# --- scheduler ----------------------------------------------------------------


def test_cap_for_length():
    assert cap_for_length(6) == 2
    assert cap_for_length(5) == 2
    assert cap_for_length(7) == 3
    assert cap_for_length(3) == 1


def test_scheduler_cadence_and_budget():
    sched = HintScheduler(expert_length=6, seed=1)
    assert sched.cap == 2
    fires = 0
    for _ in range(50):
        if sched.on_step(hint_pending=False):
            sched.hint_given()
            fires += 1
    assert fires == 2  # capped at ceil(6/3)


def test_scheduler_holds_while_hint_pending():
    sched = HintScheduler(expert_length=9, seed=2)
    fires = sum(1 for _ in range(30) if sched.on_step(hint_pending=True))
    assert fires == 0


def test_scheduler_checks_every_2_or_3_steps():
    sched = HintScheduler(expert_length=300, seed=3)
    gaps = []
    since = 0
    for _ in range(200):
        since += 1
        if sched.on_step(hint_pending=False):
            sched.hint_given()
            gaps.append(since)
            since = 0
    assert gaps and all(g in (2, 3) for g in gaps)
    assert {2, 3} <= set(gaps)  # both cadences actually occur


# --- session flow ---------------------------------------------------------------


def test_unsolicited_hint_flow():
    provider = fixed_hint_provider(["F", "G&~H", "~H", "I", "I&~H"])
    session = scripted_session(
        FIG_PROBLEM, run_script=False, condition="NS", hint_provider=provider
    )
    shown = 0
    play_script(session)
    shown = sum(1 for e in session.log.events if e.kind == "hint_shown")
    cap = cap_for_length(FIG_PROBLEM.expert_length)
    assert 1 <= shown <= cap


def test_request_hint_and_one_at_a_time():
    provider = fixed_hint_provider(["F", "I"])
    session = scripted_session(
        FIG_PROBLEM, run_script=False, condition="NS", hint_provider=provider
    )
    hint = session.request_hint()
    assert hint.source == "requested"
    with pytest.raises(HintAlreadyPresent):
        session.request_hint()
    denied = [e for e in session.log.events if e.kind == "hint_request_denied"]
    assert len(denied) == 1


def test_request_hint_forbidden_outside_training():
    pretest = make_problem("pre", ["A", "A->B"], "B", phase="pretest",
                           script=[(("A->B", "A"), "MP", "B")])
    session = scripted_session(pretest, run_script=False, condition="NS",
                               hint_provider=fixed_hint_provider(["B"]))
    with pytest.raises(PhaseForbidsHints):
        session.request_hint()
    with pytest.raises(PhaseForbidsSkip):
        session.skip()


def test_no_hint_events_outside_training():
    pretest = make_problem("pre", ["A", "A->B"], "B", phase="pretest",
                           script=[(("A->B", "A"), "MP", "B")])
    session = scripted_session(pretest, condition="NS",
                               hint_provider=fixed_hint_provider(["B"] * 5))
    kinds = {e.kind for e in session.log.events}
    assert "hint_shown" not in kinds


def test_request_denied_when_no_hint_available():
    session = scripted_session(FIG_PROBLEM, run_script=False, condition="NS",
                               hint_provider=fixed_hint_provider([]))
    with pytest.raises(NoHintAvailable):
        session.request_hint()
    assert session.log.events[-1].kind == "hint_request_denied"


def test_advance_through_curriculum():
    cur = single_curriculum(CHAIN_PROBLEM)
    second = make_problem("chain2", ["A", "A->B"], "B",
                          script=[(("A->B", "A"), "MP", "B")])
    cur.problems[second.id] = second
    cur.order["training"].append(second.id)
    session = TutorSession("s", "stu", "none", cur)
    play_script(session)
    assert session.problem.id == "chain2"
    play_script(session)
    assert session.finished


def test_restart_resets_attempt():
    session = scripted_session(CHAIN_PROBLEM, run_script=False)
    given = session.state.find_justified(parse("I&F"))
    session.step([given.id], "Simp", "F")
    session.restart()
    assert session.attempt_no == 2
    assert session.state.step_count == 0
    assert session.state.find_justified(parse("F")) is None


def test_skip_advances():
    session = scripted_session(CHAIN_PROBLEM, run_script=False)
    finished = session.skip()
    assert finished and session.finished


# --- replay --------------------------------------------------------------------


def test_replay_matches_live_state_keys():
    # Track keys live...
    session = scripted_session(CHAIN_PROBLEM, run_script=False)
    live_keys = [state_key(session.state)]
    for step in CHAIN_PROBLEM.expert_script:
        ids = [session.state.find_justified(parse(p)).id for p in step.premises]
        state = session.state
        session.step(ids, step.rule, step.conclusion)
        live_keys.append(state_key(state))
    # ...then replay must reproduce exactly the same sequence.
    attempts = replay(session.log.events)
    assert len(attempts) == 1
    assert attempts[0].completed
    assert attempts[0].keys == live_keys


def test_replay_reconstructs_restart_as_two_attempts():
    session = scripted_session(CHAIN_PROBLEM, run_script=False)
    given = session.state.find_justified(parse("I&F"))
    session.step([given.id], "Simp", "F")
    session.restart()
    play_script(session)
    attempts = replay(session.log.events)
    assert len(attempts) == 2
    assert not attempts[0].completed and attempts[0].gave_up
    assert attempts[1].completed
    assert attempts[0].attempt == 1 and attempts[1].attempt == 2


def test_replay_rejects_tampered_log():
    session = scripted_session(CHAIN_PROBLEM)
    events = list(session.log.events)
    bad = []
    for e in events:
        if e.kind == "derive" and e.payload.get("statement") == "F":
            payload = dict(e.payload, statement="G")
            e = SessionEvent(e.sid, e.pid, e.seq, e.t_ms, e.kind, payload)
        bad.append(e)
    with pytest.raises(CorruptLog):
        replay(bad)


def test_replay_rejects_sequence_gap():
    session = scripted_session(CHAIN_PROBLEM)
    events = [e for e in session.log.events if e.seq != 2]
    with pytest.raises(CorruptLog):
        replay(events)


def test_replay_scheduler_trace_tracks_budget():
    provider = fixed_hint_provider(["F", "G&~H", "~H", "I", "I&~H"])
    session = scripted_session(
        FIG_PROBLEM, run_script=False, condition="NS", hint_provider=provider
    )
    play_script(session)
    attempts = replay(session.log.events)
    trace = attempts[0].scheduler_trace
    shown = sum(1 for e in session.log.events if e.kind == "hint_shown")
    assert trace[-1]["unsolicited_given"] == shown
    assert trace[-1]["cap"] == cap_for_length(FIG_PROBLEM.expert_length)


def test_replay_determinism_under_fuzzing():
    rng = random.Random(2024)
    for trial in range(25):
        provider = fixed_hint_provider(["F", "G&~H", "~H", "I", "I&~H", "J&K"])
        session = scripted_session(
            FIG_PROBLEM,
            sid=f"fuzz{trial}",
            run_script=False,
            condition="NS",
            hint_provider=provider,
        )
        # Random walk: valid script steps, errors, deletes, restarts.
        for _ in range(rng.randint(3, 25)):
            if session.finished:
                break
            roll = rng.random()
            if roll < 0.1:
                deletable = [
                    n.id
                    for n in session.state.nodes.values()
                    if n.kind not in ("given", "conclusion")
                ]
                if deletable:
                    session.delete(rng.choice(deletable))
                continue
            if roll < 0.18:
                session.restart()
                continue
            if roll < 0.3:
                nodes = [n.id for n in session.state.justified_nodes()]
                if len(nodes) >= 2:
                    session.step(rng.sample(nodes, 2), "Simp")
                continue
            steps = [
                s
                for s in session.problem.expert_script
                if session.state.find_justified(parse(s.conclusion)) is None
                and all(
                    session.state.find_justified(parse(p)) is not None
                    for p in s.premises
                )
            ]
            if not steps:
                break
            step = rng.choice(steps)
            ids = [
                session.state.find_justified(parse(p)).id for p in step.premises
            ]
            session.step(ids, step.rule, step.conclusion)
        live_events = list(session.log.events)
        attempts = replay(live_events)
        # Re-serialize and replay again: identical key sequences.
        again = replay(list(live_events))
        assert [a.keys for a in attempts] == [a.keys for a in again]
        assert [state_key(a.state) for a in attempts] == [
            state_key(a.state) for a in again
        ]
