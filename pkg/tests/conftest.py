"""Shared fixtures: tiny problems, scripted sessions, corpus builders."""

import pytest

from logictutor.formula import parse
from logictutor.network import InteractionNetwork
from logictutor.problems import Curriculum, ProblemDef, ScriptStep, load_default_curriculum
from logictutor.session import TutorSession


def make_problem(
    pid,
    givens,
    conclusion,
    catalog=("MP", "MT", "Simp", "Conj", "Add", "DS"),
    phase="training",
    script=(),
    worked=False,
):
    steps = tuple(ScriptStep(tuple(p), r, c) for p, r, c in script)
    return ProblemDef(
        id=pid,
        givens=tuple(parse(g) for g in givens),
        conclusion=parse(conclusion),
        catalog_ids=tuple(catalog),
        expert_length=len(steps) or 5,
        phase=phase,
        focus="",
        worked=worked,
        expert_script=steps,
    )


# Three-step chain: givens -> F -> G&~H -> J (the Fig. 4/5 shape).
CHAIN_PROBLEM = make_problem(
    "chain",
    ["I&F", "F->(G&~H)", "(G&~H)->J"],
    "J",
    script=[
        (("I&F",), "Simp", "F"),
        (("F->(G&~H)", "F"), "MP", "G&~H"),
        (("(G&~H)->J", "G&~H"), "MP", "J"),
    ],
)

FIG_PROBLEM = make_problem(
    "fig",
    ["I&F", "F->(G&~H)", "(I&~H)->(J&K)"],
    "J&K",
    script=[
        (("I&F",), "Simp", "F"),
        (("F->(G&~H)", "F"), "MP", "G&~H"),
        (("G&~H",), "Simp", "~H"),
        (("I&F",), "Simp", "I"),
        (("I", "~H"), "Conj", "I&~H"),
        (("(I&~H)->(J&K)", "I&~H"), "MP", "J&K"),
    ],
)


def single_curriculum(problem: ProblemDef) -> Curriculum:
    cur = Curriculum()
    cur.problems[problem.id] = problem
    cur.order = {p: [] for p in ("intro", "pretest", "training", "posttest")}
    cur.order[problem.phase] = [problem.id]
    return cur


def scripted_session(problem, sid="s1", run_script=True, **kwargs) -> TutorSession:
    """A session over one problem, optionally playing the expert script."""
    session = TutorSession(
        sid=sid,
        student_id=sid,
        condition=kwargs.pop("condition", "none"),
        curriculum=single_curriculum(problem),
        clock=kwargs.pop("clock", None),
        **kwargs,
    )
    if run_script:
        play_script(session)
    return session


def play_script(session: TutorSession) -> None:
    for step in session.problem.expert_script:
        if session.finished:
            break
        ids = []
        for text in step.premises:
            node = session.state.find_justified(parse(text))
            ids.append(node.id)
        session.step(ids, step.rule, step.conclusion)


def manual_network(problem_id, conclusion, initial_key, catalog=()) -> InteractionNetwork:
    net = InteractionNetwork(problem_id, conclusion, initial_key, tuple(catalog))
    net.state(initial_key)
    return net


def add_edge(net, src, dst, rule="MP", freq=1, visits=None):
    """Wire an add-transition; the added statement is the set difference."""
    src_set = set(src.split(",")) if src else set()
    dst_set = set(dst.split(","))
    (added,) = dst_set - src_set
    t = net.bump_transition(src, dst, "add", rule, added)
    t.freq = freq
    net.state(src)
    rec = net.state(dst)
    if visits is not None:
        rec.visits = visits
    return t


@pytest.fixture(scope="session")
def curriculum():
    return load_default_curriculum()
