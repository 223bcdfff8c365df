"""Per-student metrics, the composite pretest score, and cohort analyses.

Steps count every attempt at deriving a node, correct or not; accuracy
is the correct share of those.  A hint is justified when the student
derived its statement, adopted when that node is necessary to the final
solution of a completed proof, and otherwise unused: Gave Up if the
attempt ended by restart/skip, Solved Without if the proof was finished
around it.  The unused hints are further classified as attempted when a
majority of the next few derivation targets (3 for NS hints, 5 for WP)
share at least one atom with the hint statement.

The composite score 0.5*(1-time) + 0.3*(1-steps) + 0.2*accuracy runs on
cohort percentiles, drives the stratified condition assignment, and the
High/Low proficiency split is a median split on it.
"""

from __future__ import annotations

import csv
import random
import statistics
from dataclasses import dataclass, field
from pathlib import Path

from scipy import stats as scipy_stats

from .errors import DegenerateInput, OutOfRange, TooFewStudents
from .formula import atoms, parse
from .proof import necessary_nodes
from .session import AttemptReplay, replay

NS_WINDOW = 3
WP_WINDOW = 5

HIGH = "High"
LOW = "Low"


@dataclass
class PhaseMetrics:
    total_time: float = 0.0  # minutes
    total_steps: int = 0
    accuracy: float = 0.0  # percent correct of total steps
    total_requests: int = 0


@dataclass
class HintOutcome:
    statement: str
    type: str
    source: str
    status: str  # justified | unused
    adopted: bool | None = None  # defined only when justified
    unused_case: str | None = None  # gave_up | solved_without
    attempted: bool | None = None  # defined for unused hints
    steps_until_justified: int | None = None
    steps_before: int | None = None


@dataclass
class SessionMetrics:
    student: str
    condition: str
    pretest: PhaseMetrics = field(default_factory=PhaseMetrics)
    training: PhaseMetrics = field(default_factory=PhaseMetrics)
    posttest: PhaseMetrics = field(default_factory=PhaseMetrics)
    total_added: int = 0
    justification_rate: float = 0.0  # percent of hints justified
    adoption_rate: float = 0.0  # percent of justified hints adopted
    steps_until_justified: float = 0.0  # mean over justified hints
    total_unused: int = 0
    pct_unused_of_total: float = 0.0
    pct_attempted_of_unused: float = 0.0
    steps_before: float = 0.0  # mean over unused hints
    hints: list[HintOutcome] = field(default_factory=list)


def classify_attempted(hint_type: str, hint_statement: str, step_targets) -> bool:
    """Did the steps after a hint work toward it?

    A step counts when its target statement shares at least one atom with
    the hint.  The window is 3 steps for NS, 5 for WP; attempted means a
    strict majority of the window (2 of 3, 3 of 5), or of the steps that
    actually happened when fewer occurred.  No steps means not attempted.
    """
    window = WP_WINDOW if hint_type == "WP" else NS_WINDOW
    taken = list(step_targets)[:window]
    if not taken:
        return False
    hint_atoms = atoms(parse(hint_statement))
    qualifying = sum(
        1 for t in taken if t is not None and atoms(parse(t)) & hint_atoms
    )
    threshold = len(taken) // 2 + 1
    return qualifying >= threshold


def _step_target(event) -> str | None:
    if event.kind == "derive":
        return event.payload.get("statement")
    return event.payload.get("claimed")


def _hints_for_attempt(attempt: AttemptReplay) -> list[HintOutcome]:
    events = attempt.events
    needed = necessary_nodes(attempt.state) if attempt.completed else set()
    unused_case = (
        "solved_without"
        if attempt.completed
        else ("gave_up" if attempt.gave_up else None)
    )
    outcomes: list[HintOutcome] = []
    for i, ev in enumerate(events):
        if ev.kind != "hint_shown":
            continue
        outcome = HintOutcome(
            statement=ev.payload["statement"],
            type=ev.payload["type"],
            source=ev.payload["source"],
            status="unused",
        )
        # A later hint_shown means this hint closed unjustified (deleted):
        # at most one hint is ever pending.
        justified_node = None
        steps_to_justify = 0
        steps = 0
        targets: list[str | None] = []
        for later in events[i + 1 :]:
            if later.kind in ("derive", "derive_error"):
                steps += 1
                targets.append(_step_target(later))
            elif later.kind == "hint_justified" and justified_node is None:
                justified_node = later.payload["node_id"]
                steps_to_justify = steps
                break
            elif later.kind == "hint_shown":
                break
        if justified_node is not None:
            outcome.status = "justified"
            outcome.steps_until_justified = steps_to_justify
            outcome.adopted = attempt.completed and justified_node in needed
        else:
            # Steps Before runs from the hint to the attempt's end.
            total_after = sum(
                1
                for later in events[i + 1 :]
                if later.kind in ("derive", "derive_error")
            )
            outcome.unused_case = unused_case
            outcome.steps_before = total_after
            window = [
                _step_target(later)
                for later in events[i + 1 :]
                if later.kind in ("derive", "derive_error")
            ]
            outcome.attempted = classify_attempted(
                outcome.type, outcome.statement, window
            )
        outcomes.append(outcome)
    return outcomes


def compute_metrics(events) -> SessionMetrics:
    """All per-student aggregates from one student's event log."""
    attempts = replay(events)
    student = attempts[0].events[0].payload.get("student", attempts[0].events[0].sid)
    metrics = SessionMetrics(student=student, condition=attempts[0].condition)
    phases = {
        "pretest": metrics.pretest,
        "training": metrics.training,
        "posttest": metrics.posttest,
    }
    correct_steps = {name: 0 for name in phases}

    for attempt in attempts:
        phase = attempt.phase
        pm = phases.get(phase)
        if pm is None:
            continue  # intro is interface practice, not analyzed
        end = attempt.ended_at
        if end is None and attempt.events:
            end = attempt.events[-1].t_ms
        pm.total_time += max(0, (end or attempt.started_at) - attempt.started_at) / 60000.0
        for ev in attempt.events:
            if ev.kind == "derive":
                pm.total_steps += 1
                correct_steps[phase] += 1
            elif ev.kind == "derive_error":
                pm.total_steps += 1
            elif ev.kind == "hint_request_denied":
                pm.total_requests += 1
            elif ev.kind == "hint_shown" and ev.payload.get("source") == "requested":
                pm.total_requests += 1
        metrics.hints.extend(_hints_for_attempt(attempt))

    for name, pm in phases.items():
        if pm.total_steps:
            pm.accuracy = 100.0 * correct_steps[name] / pm.total_steps

    hints = metrics.hints
    justified = [h for h in hints if h.status == "justified"]
    adopted = [h for h in justified if h.adopted]
    unused = [h for h in hints if h.status == "unused"]
    attempted_unused = [h for h in unused if h.attempted]
    metrics.total_added = len(hints)
    metrics.total_unused = len(unused)
    if hints:
        metrics.justification_rate = 100.0 * len(justified) / len(hints)
        metrics.pct_unused_of_total = 100.0 * len(unused) / len(hints)
    if justified:
        metrics.adoption_rate = 100.0 * len(adopted) / len(justified)
        metrics.steps_until_justified = statistics.mean(
            h.steps_until_justified for h in justified
        )
    if unused:
        metrics.pct_attempted_of_unused = 100.0 * len(attempted_unused) / len(unused)
        known = [h.steps_before for h in unused if h.steps_before is not None]
        if known:
            metrics.steps_before = statistics.mean(known)
    return metrics


# --- score, percentiles, cohort splits --------------------------------------


@dataclass(frozen=True)
class ScoreWeights:
    w_time: float = 0.5
    w_steps: float = 0.3
    w_acc: float = 0.2

    def __post_init__(self):
        total = self.w_time + self.w_steps + self.w_acc
        if abs(total - 1.0) > 1e-9:
            raise OutOfRange(f"score weights must sum to 1, got {total}")


DEFAULT_WEIGHTS = ScoreWeights()


def score(
    time_pct: float,
    steps_pct: float,
    acc_pct: float,
    weights: ScoreWeights = DEFAULT_WEIGHTS,
) -> float:
    """Composite performance score on percentile-normalized inputs.

    Time and steps count against the score (lower percentiles are
    better), accuracy counts for it.
    """
    for name, v in (("time", time_pct), ("steps", steps_pct), ("accuracy", acc_pct)):
        if not (0.0 <= v <= 1.0):
            raise OutOfRange(f"{name} percentile {v} outside [0, 1]")
    return (
        weights.w_time * (1.0 - time_pct)
        + weights.w_steps * (1.0 - steps_pct)
        + weights.w_acc * acc_pct
    )


def percentiles(values) -> list[float]:
    """Empirical rank/n in [0, 1]; tied values share their mean rank."""
    values = list(values)
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        mean_rank = (i + j) / 2 + 1  # 1-based
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank / n
        i = j + 1
    return ranks


def pretest_scores(metrics_list) -> dict[str, float]:
    """Composite pretest score per student across a cohort."""
    times = percentiles([m.pretest.total_time for m in metrics_list])
    steps = percentiles([m.pretest.total_steps for m in metrics_list])
    accs = percentiles([m.pretest.accuracy for m in metrics_list])
    return {
        m.student: score(times[i], steps[i], accs[i])
        for i, m in enumerate(metrics_list)
    }


def assign_conditions(scores: dict[str, float], conditions, seed: int) -> dict[str, str]:
    """Stratified random assignment balanced on the score."""
    conditions = list(conditions)
    students = sorted(scores, key=lambda s: (scores[s], s))
    if len(students) < len(conditions):
        raise TooFewStudents(
            f"{len(students)} students cannot fill {len(conditions)} conditions"
        )
    rng = random.Random(seed)
    assignment: dict[str, str] = {}
    for i in range(0, len(students), len(conditions)):
        stratum = students[i : i + len(conditions)]
        picks = rng.sample(conditions, len(stratum))
        for student, cond in zip(stratum, picks):
            assignment[student] = cond
    return assignment


def median_split(scores: dict[str, float]) -> dict[str, str]:
    """High/Low proficiency groups; scores at the median go Low."""
    if len(scores) < 2:
        raise TooFewStudents("a median split needs at least 2 students")
    med = statistics.median(scores.values())
    return {s: (HIGH if v > med else LOW) for s, v in scores.items()}


def correlate(xs, ys) -> tuple[float, float]:
    """Pearson r with a two-sided p from the t-distribution (n-2 dof)."""
    xs, ys = list(xs), list(ys)
    n = len(xs)
    if n < 3 or len(ys) != n:
        raise DegenerateInput("need at least 3 paired observations")
    mx, my = statistics.mean(xs), statistics.mean(ys)
    cov = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    vx = sum((x - mx) ** 2 for x in xs)
    vy = sum((y - my) ** 2 for y in ys)
    if vx == 0 or vy == 0:
        raise DegenerateInput("constant input vector")
    r = cov / (vx * vy) ** 0.5
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return r, 0.0
    t = r * ((n - 2) / (1.0 - r * r)) ** 0.5
    p = 2.0 * scipy_stats.t.sf(abs(t), n - 2)
    return r, float(p)


# --- reporting ---------------------------------------------------------------

_PHASE_FIELDS = ("total_time", "total_steps", "accuracy", "total_requests")
_HINT_FIELDS = (
    "total_added",
    "justification_rate",
    "adoption_rate",
    "steps_until_justified",
    "total_unused",
    "pct_unused_of_total",
    "pct_attempted_of_unused",
    "steps_before",
)


def report_columns() -> list[str]:
    cols = ["student", "condition", "split"]
    for phase in ("pretest", "training", "posttest"):
        cols.extend(f"{phase}_{f}" for f in _PHASE_FIELDS)
    cols.extend(_HINT_FIELDS)
    return cols


def metrics_row(m: SessionMetrics, split: str = "") -> dict:
    row = {"student": m.student, "condition": m.condition, "split": split}
    for phase in ("pretest", "training", "posttest"):
        pm = getattr(m, phase)
        for f in _PHASE_FIELDS:
            row[f"{phase}_{f}"] = getattr(pm, f)
    for f in _HINT_FIELDS:
        row[f] = getattr(m, f)
    return row


def write_report(metrics_list, path: str | Path) -> None:
    """One CSV row per student, stable column order, High/Low tagged."""
    metrics_list = sorted(metrics_list, key=lambda m: m.student)
    splits = {}
    if len(metrics_list) >= 2:
        splits = median_split(pretest_scores(metrics_list))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=report_columns())
        writer.writeheader()
        for m in metrics_list:
            writer.writerow(metrics_row(m, splits.get(m.student, "")))


def hint_posttest_correlations(metrics_list) -> list[dict]:
    """Pearson r/p of hint usage rates against posttest performance."""
    out = []
    by_condition: dict[str, list[SessionMetrics]] = {}
    for m in metrics_list:
        by_condition.setdefault(m.condition, []).append(m)
    for condition in sorted(by_condition):
        group = by_condition[condition]
        for rate_name in ("justification_rate", "adoption_rate"):
            for metric_name in ("total_time", "total_steps", "accuracy"):
                xs = [getattr(m, rate_name) for m in group]
                ys = [getattr(m.posttest, metric_name) for m in group]
                try:
                    r, p = correlate(xs, ys)
                except DegenerateInput:
                    continue
                out.append(
                    {
                        "condition": condition,
                        "pair": f"{rate_name}-posttest_{metric_name}",
                        "r": r,
                        "p": p,
                        "n": len(group),
                    }
                )
    return out
