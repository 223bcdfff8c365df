"""The packaged curriculum: structure, script validity, loading errors."""

import json

import pytest

from logictutor.errors import TutorError
from logictutor.formula import parse
from logictutor.problems import load_curriculum, problem_from_json
from logictutor.proof import attempt_step, new_proof


def test_phase_counts(curriculum):
    assert len(curriculum.phase_problems("intro")) == 3
    assert len(curriculum.phase_problems("pretest")) == 1
    assert len(curriculum.phase_problems("training")) == 18
    assert len(curriculum.phase_problems("posttest")) == 4
    assert len(curriculum.sequence()) == 26


def test_intro_has_two_worked_examples(curriculum):
    worked = [p for p in curriculum.phase_problems("intro") if p.worked]
    assert len(worked) == 2
    assert not curriculum.phase_problems("intro")[2].worked


def test_every_expert_script_replays_cleanly(curriculum):
    for problem in curriculum.sequence():
        state = new_proof(problem)
        for step in problem.expert_script:
            ids = []
            for text in step.premises:
                node = state.find_justified(parse(text))
                assert node is not None, (problem.id, step)
                ids.append(node.id)
            result = attempt_step(state, ids, step.rule, parse(step.conclusion))
            assert result.kind == "derived", (problem.id, step, result.message)
        assert state.is_complete(), problem.id
        assert state.error_count == 0
        assert problem.expert_length == len(problem.expert_script)


def test_assessed_problems_run_five_to_eight_steps(curriculum):
    for phase in ("pretest", "training", "posttest"):
        for problem in curriculum.phase_problems(phase):
            assert 5 <= problem.expert_length <= 8, problem.id


def test_catalogs_are_known_rules(curriculum):
    from logictutor.rules import CATALOG

    for problem in curriculum.sequence():
        assert problem.catalog_ids
        for rid in problem.catalog_ids:
            assert rid in CATALOG
        script_rules = {s.rule for s in problem.expert_script}
        assert script_rules <= set(problem.catalog_ids), problem.id


def test_focus_message_names_rules(curriculum):
    problem = curriculum.get("train-01")
    assert problem.focus.startswith("Think about the following rules")
    for rid in {s.rule for s in problem.expert_script}:
        assert rid in problem.focus


def test_load_errors(tmp_path):
    with pytest.raises(TutorError):
        load_curriculum(tmp_path)  # no manifest
    (tmp_path / "manifest.json").write_text(json.dumps({"training": ["ghost"]}))
    with pytest.raises(TutorError):
        load_curriculum(tmp_path)


def test_problem_from_json_rejects_unknown_rule():
    with pytest.raises(TutorError):
        problem_from_json(
            {
                "id": "x",
                "givens": ["A"],
                "conclusion": "B",
                "catalog": ["NOPE"],
                "expert_length": 1,
                "phase": "training",
            }
        )
