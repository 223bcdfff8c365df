"""Synthetic students: parameterized policies generating solution corpora.

A simulated student works through problems exactly as a live one would,
driving a TutorSession so that every derivation passes the kernel and
every event lands in the same log format.  At each step the student may
give up, fumble the rule selection (a guaranteed arity error), work
toward a visible hint along a shortest derivation path (depth <= 3), or
explore: with probability beta the next expert-script step, otherwise a
uniformly random valid derivation.

Runs are deterministic: every attempt draws its own PRNG stream from the
master seed, the student id and the problem id, so corpora are
byte-identical across runs and safe to generate in parallel.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, replace

from .errors import CorpusTooSparse, NoExpertScript, PhaseForbidsSkip
from .events import SessionEvent
from .formula import Formula, parse, render
from .problems import Curriculum, ProblemDef
from .search import add_candidates, find_path, one_step_conclusions
from .session import TutorSession

STEP_CAP = 60  # paper-scale attempts run 5-20 steps; 60 bounds runaway walks


@dataclass(frozen=True)
class StudentPolicy:
    name: str
    p_follow: float = 1.0
    p_err: float = 0.0
    beta: float = 0.8
    p_giveup: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for field_name in ("p_follow", "p_err", "beta", "p_giveup"):
            v = getattr(self, field_name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{field_name} must be a probability, got {v}")


IDEAL = StudentPolicy("ideal", p_follow=1.0, p_err=0.0, beta=1.0, p_giveup=0.0)


def derive_seed(*parts) -> int:
    digest = hashlib.sha256(":".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


class SynthClock:
    """Deterministic per-session clock; a few seconds pass per event."""

    def __init__(self, seed: int, start_ms: int = 1_700_000_000_000):
        self.rng = random.Random(seed)
        self.now = start_ms + self.rng.randint(0, 3_600_000)

    def __call__(self) -> int:
        self.now += self.rng.randint(1_500, 15_000)
        return self.now


def _single_problem_curriculum(problem: ProblemDef) -> Curriculum:
    cur = Curriculum()
    cur.problems[problem.id] = problem
    cur.order = {phase: [] for phase in ("intro", "pretest", "training", "posttest")}
    cur.order[problem.phase] = [problem.id]
    return cur


def _script_candidate(session, statements: set[Formula]):
    """First expert-script step whose premises exist and conclusion doesn't."""
    for step in session.problem.expert_script:
        conclusion = parse(step.conclusion)
        if conclusion in statements:
            continue
        premises = [parse(p) for p in step.premises]
        if all(p in statements for p in premises):
            return tuple(premises), step.rule, conclusion
    return None


def _node_ids(session, premises) -> list[int]:
    ids = []
    for p in premises:
        node = session.state.find_justified(p)
        if node is None:
            raise AssertionError(f"premise {render(p)} not on screen")
        ids.append(node.id)
    return ids


def _force_error(session, rng: random.Random):
    """A guaranteed arity mismatch: the classic mis-selection."""
    from .rules import CATALOG

    nodes = [n.id for n in session.state.justified_nodes()]
    one_premise = [r for r in session.problem.catalog_ids if CATALOG[r].arity == 1]
    two_premise = [r for r in session.problem.catalog_ids if CATALOG[r].arity == 2]
    if len(nodes) >= 2 and one_premise:
        return session.step(rng.sample(nodes, 2), rng.choice(one_premise))
    if two_premise:
        return session.step([rng.choice(nodes)], rng.choice(two_premise))
    return session.step([nodes[0], nodes[0]], one_premise[0])


def _giveup(session) -> None:
    """Abandon the attempt: skip in training, restart elsewhere."""
    try:
        session.skip()
    except PhaseForbidsSkip:
        session.restart()


def run_problem(session: TutorSession, policy: StudentPolicy, rng: random.Random) -> None:
    """Drive the session until the current problem is left behind."""
    problem = session.problem
    if not problem.expert_script:
        raise NoExpertScript(f"problem {problem.id} has no expert script")
    idx = session.idx
    catalog = problem.catalog_ids
    pool = _disjunct_pool(problem)
    restarts = 0

    while not session.finished and session.idx == idx:
        # After repeated dead ends on a test problem, solve it straight.
        desperate = restarts >= 2
        if session.state.step_count >= STEP_CAP:
            if session.rules_for_phase.skip_enabled:
                session.skip()
                break
            session.restart()
            restarts += 1
            continue
        if not desperate and rng.random() < policy.p_giveup:
            before = session.attempt_no
            _giveup(session)
            if session.idx == idx and session.attempt_no != before:
                restarts += 1
            continue
        if not desperate and rng.random() < policy.p_err:
            _force_error(session, rng)
            continue

        statements = set(session.state.justified_statements())
        pending = session.state.pending_hint()
        if pending is not None and (desperate or rng.random() < policy.p_follow):
            path = find_path(
                frozenset(statements), pending.statement, catalog, max_depth=3
            )
            if path:
                premises, rule, conclusion = path[0]
                session.step(_node_ids(session, premises), rule, conclusion)
                continue

        script_step = _script_candidate(session, statements)
        if script_step is not None and (desperate or rng.random() < policy.beta):
            premises, rule, conclusion = script_step
            session.step(_node_ids(session, premises), rule, conclusion)
            continue

        options = [
            (c, w)
            for c, w in one_step_conclusions(frozenset(statements), catalog).items()
            if c not in statements
        ]
        if "Add" in catalog:
            options.extend(add_candidates(frozenset(statements), pool))
        options.sort(key=lambda cw: render(cw[0]))
        if script_step is not None:
            options.append((script_step[2], (script_step[0], script_step[1])))
        if not options:
            _giveup(session)
            continue
        conclusion, (premises, rule) = rng.choice(options)
        session.step(_node_ids(session, premises), rule, conclusion)


def _disjunct_pool(problem: ProblemDef) -> list[Formula]:
    """Disjuncts a student might dream up for Add: conclusion subformulas."""
    pool = []
    stack = [problem.conclusion]
    while stack:
        f = stack.pop()
        if f not in pool:
            pool.append(f)
        if hasattr(f, "child"):
            stack.append(f.child)
        elif hasattr(f, "left"):
            stack.extend([f.left, f.right])
    pool.sort(key=render)
    return pool[:6]


def simulate_attempt(
    policy: StudentPolicy,
    problem: ProblemDef,
    condition: str = "none",
    hint_provider=None,
    sid: str | None = None,
) -> list[SessionEvent]:
    """One student, one problem; returns the event log."""
    sid = sid or f"sim-{policy.name}-{policy.seed:x}"
    session = TutorSession(
        sid=sid,
        student_id=sid,
        condition=condition,
        curriculum=_single_problem_curriculum(problem),
        hint_provider=hint_provider,
        clock=SynthClock(derive_seed(policy.seed, problem.id, "clock")),
    )
    rng = random.Random(derive_seed(policy.seed, problem.id, "policy"))
    run_problem(session, policy, rng)
    return session.log.events


def simulate_student(
    policy: StudentPolicy,
    problems: list[ProblemDef],
    condition: str = "none",
    hint_provider=None,
    sid: str | None = None,
) -> list[SessionEvent]:
    """One student working a problem list in order (single session)."""
    sid = sid or f"sim-{policy.name}-{policy.seed:x}"
    cur = Curriculum()
    cur.order = {phase: [] for phase in ("intro", "pretest", "training", "posttest")}
    for p in problems:
        cur.problems[p.id] = p
        cur.order[p.phase].append(p.id)
    session = TutorSession(
        sid=sid,
        student_id=sid,
        condition=condition,
        curriculum=cur,
        hint_provider=hint_provider,
        clock=SynthClock(derive_seed(policy.seed, sid, "clock")),
    )
    while not session.finished:
        rng = random.Random(derive_seed(policy.seed, session.problem.id, "policy"))
        run_problem(session, policy, rng)
    return session.log.events


def generate_corpus(
    policy_mix: list[tuple[StudentPolicy, int]],
    problems: list[ProblemDef],
    seed: int,
    condition: str = "none",
    hint_provider=None,
    require_solutions: bool = True,
) -> list[SessionEvent]:
    """A deterministic corpus: each student of each policy works each problem."""
    events: list[SessionEvent] = []
    solved: dict[str, int] = {p.id: 0 for p in problems}
    student_no = 0
    for policy, count in policy_mix:
        for _ in range(count):
            student_no += 1
            sid = f"sim-{policy.name}-{student_no:04d}"
            attempt_policy = replace(policy, seed=derive_seed(seed, sid))
            evs = simulate_student(
                attempt_policy,
                problems,
                condition=condition,
                hint_provider=hint_provider,
                sid=sid,
            )
            events.extend(evs)
            for e in evs:
                if e.kind == "complete":
                    solved[e.pid] = solved.get(e.pid, 0) + 1
    if require_solutions and student_no:
        unsolved = [pid for pid, n in solved.items() if n == 0]
        if unsolved:
            raise CorpusTooSparse(
                f"no complete solution for problems: {', '.join(sorted(unsolved))}"
            )
    return events
