"""Problem definitions and curriculum loading.

A problem lives in one JSON file: id, givens, conclusion, the rule
catalog enabled for it, the expert solution length, its phase, the
rule-focus message shown in the info box, and (for the simulator and
worked intro examples) the expert script.  A curriculum directory holds
one file per problem plus ``manifest.json`` ordering them into the
intro/pretest/training/posttest flow.  The packaged default curriculum
is 3 intro + 1 pretest + 18 training + 4 posttest problems.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import TutorError
from .formula import Formula, parse, render
from .rules import CATALOG, Rule

PHASES = ("intro", "pretest", "training", "posttest")


@dataclass(frozen=True)
class ScriptStep:
    premises: tuple[str, ...]  # rendered statements of the premise nodes
    rule: str
    conclusion: str


@dataclass(frozen=True)
class ProblemDef:
    id: str
    givens: tuple[Formula, ...]
    conclusion: Formula
    catalog_ids: tuple[str, ...]
    expert_length: int
    phase: str
    focus: str = ""
    worked: bool = False
    expert_script: tuple[ScriptStep, ...] = ()

    @property
    def catalog(self) -> list[Rule]:
        return [CATALOG[i] for i in self.catalog_ids]

    def to_json(self) -> dict:
        # Statement strings go out in canonical form: the grammar is the
        # single serialization across logs, snapshots and API payloads.
        return {
            "id": self.id,
            "givens": [render(g) for g in self.givens],
            "conclusion": render(self.conclusion),
            "catalog": list(self.catalog_ids),
            "expert_length": self.expert_length,
            "phase": self.phase,
            "focus": self.focus,
            "worked": self.worked,
            "expert_script": [
                {
                    "premises": [_canonical(p) for p in s.premises],
                    "rule": s.rule,
                    "conclusion": _canonical(s.conclusion),
                }
                for s in self.expert_script
            ],
        }


def _canonical(text: str) -> str:
    return render(parse(text))


def problem_from_json(data: dict) -> ProblemDef:
    for rid in data["catalog"]:
        if rid not in CATALOG:
            raise TutorError(f"unknown rule id {rid!r} in problem {data.get('id')}")
    script = tuple(
        ScriptStep(
            tuple(_canonical(p) for p in s["premises"]),
            s["rule"],
            _canonical(s["conclusion"]),
        )
        for s in data.get("expert_script", [])
    )
    return ProblemDef(
        id=data["id"],
        givens=tuple(parse(g) for g in data["givens"]),
        conclusion=parse(data["conclusion"]),
        catalog_ids=tuple(data["catalog"]),
        expert_length=int(data["expert_length"]),
        phase=data["phase"],
        focus=data.get("focus", ""),
        worked=bool(data.get("worked", False)),
        expert_script=script,
    )


@dataclass
class Curriculum:
    """Problems grouped by phase, in presentation order."""

    problems: dict[str, ProblemDef] = field(default_factory=dict)
    order: dict[str, list[str]] = field(default_factory=dict)

    def phase_problems(self, phase: str) -> list[ProblemDef]:
        return [self.problems[pid] for pid in self.order.get(phase, [])]

    def sequence(self) -> list[ProblemDef]:
        return [p for phase in PHASES for p in self.phase_problems(phase)]

    def get(self, pid: str) -> ProblemDef:
        if pid not in self.problems:
            raise TutorError(f"unknown problem id {pid!r}")
        return self.problems[pid]


def load_curriculum(directory: str | Path) -> Curriculum:
    """Load a curriculum from a directory of problem files + manifest."""
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.exists():
        raise TutorError(f"no manifest.json in {directory}")
    manifest = json.loads(manifest_path.read_text())
    cur = Curriculum()
    for phase in PHASES:
        cur.order[phase] = list(manifest.get(phase, []))
    for path in sorted(directory.glob("*.json")):
        if path.name == "manifest.json":
            continue
        prob = problem_from_json(json.loads(path.read_text()))
        cur.problems[prob.id] = prob
    for phase, pids in cur.order.items():
        for pid in pids:
            if pid not in cur.problems:
                raise TutorError(f"manifest names missing problem {pid!r} ({phase})")
    return cur


def default_curriculum_dir() -> Path:
    """Filesystem path of the packaged default curriculum."""
    return Path(str(resources.files("logictutor").joinpath("data/curriculum")))


def load_default_curriculum() -> Curriculum:
    return load_curriculum(default_curriculum_dir())
