"""Operator command line.

Subcommands: gen-corpus, build-network, hint, replay, metrics, assign,
serve.  Everything except serve is file based.  Exit codes: 0 success,
1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .errors import TutorError
from .events import group_by_session, read_jsonl, write_jsonl
from .formula import render
from .hints import next_step_hint_at, waypoint_hint_at, match_statements
from .mdp import RewardConfig, value_iterate
from .metrics import (
    assign_conditions,
    compute_metrics,
    hint_posttest_correlations,
    percentiles,
    score,
    write_report,
)
from .network import build_network, corpus_node_stats, read_snapshot, write_snapshot
from .problems import default_curriculum_dir, load_curriculum
from .session import replay
from .simulate import StudentPolicy, generate_corpus


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


DEFAULT_POLICIES = [
    {"name": "expert", "count": 10, "p_follow": 1.0, "p_err": 0.0, "beta": 1.0, "p_giveup": 0.0},
    {"name": "good", "count": 25, "p_follow": 0.9, "p_err": 0.05, "beta": 0.8, "p_giveup": 0.005},
    {"name": "explorer", "count": 25, "p_follow": 0.8, "p_err": 0.15, "beta": 0.5, "p_giveup": 0.01},
]


def _load_policies(path: str | None) -> list[tuple[StudentPolicy, int]]:
    entries = DEFAULT_POLICIES if path is None else json.loads(Path(path).read_text())
    mix = []
    for e in entries:
        mix.append(
            (
                StudentPolicy(
                    name=e["name"],
                    p_follow=e.get("p_follow", 1.0),
                    p_err=e.get("p_err", 0.0),
                    beta=e.get("beta", 0.8),
                    p_giveup=e.get("p_giveup", 0.0),
                ),
                int(e.get("count", 1)),
            )
        )
    return mix


def _problems_from_dir(directory: str | None):
    cur = load_curriculum(directory or default_curriculum_dir())
    return cur


def cmd_gen_corpus(args) -> int:
    cur = _problems_from_dir(args.problems)
    problems = (
        [cur.get(pid) for pid in args.only.split(",")]
        if args.only
        else cur.phase_problems("training")
    )
    mix = _load_policies(args.policies)
    events = generate_corpus(mix, problems, seed=args.seed)
    write_jsonl(events, args.out)
    print(f"wrote {len(events)} events ({sum(c for _, c in mix)} students, "
          f"{len(problems)} problems) to {args.out}")
    return 0


def cmd_build_network(args) -> int:
    events = read_jsonl(args.logs)
    net = build_network(events, args.problem)
    cfg = RewardConfig.from_json(json.loads(Path(args.rewards).read_text())) if args.rewards else RewardConfig()
    value_iterate(net, cfg)
    write_snapshot(net, args.out)
    print(
        f"{args.problem}: {len(net.states)} states, {len(net.transitions)} "
        f"transitions, V(start)={net.values[net.initial_key]:.1f} -> {args.out}"
    )
    return 0


def cmd_hint(args) -> int:
    net = read_snapshot(args.network)
    statements = [render_parse(s) for s in args.state.split(",")]
    matched = match_statements(net, [], list(reversed(statements)))
    if args.type.lower() == "wp":
        hint = waypoint_hint_at(net, matched.key)
    else:
        hint = next_step_hint_at(net, matched.key)
    print(f"{render(hint.statement)} (depth {hint.depth}, value {hint.value:.1f})")
    if matched.dropped:
        print(f"(matched after dropping {matched.dropped} recent statements)")
    return 0


def render_parse(text: str) -> str:
    from .formula import parse

    return render(parse(text))


def cmd_replay(args) -> int:
    events = read_jsonl(args.logs)
    total_attempts = 0
    for sid, evs in sorted(group_by_session(events).items()):
        attempts = replay(evs)
        total_attempts += len(attempts)
        for a in attempts:
            status = "complete" if a.completed else ("gave-up" if a.gave_up else "open")
            print(
                f"{sid} {a.problem.id} attempt {a.attempt}: {len(a.events)} events, "
                f"{a.state.step_count} steps, {a.state.error_count} errors, {status}"
            )
    print(f"replayed {total_attempts} attempts from {len(group_by_session(events))} sessions")
    return 0


def cmd_metrics(args) -> int:
    events = read_jsonl(args.logs)
    sessions = group_by_session(events)
    metrics = [compute_metrics(evs) for _, evs in sorted(sessions.items())]
    write_report(metrics, args.out)
    print(f"wrote metrics for {len(metrics)} students to {args.out}")
    correlations = hint_posttest_correlations(metrics)
    if correlations:
        print("condition  pair                                     r        p")
        for c in correlations:
            print(
                f"{c['condition']:<9}  {c['pair']:<40} {c['r']:+.3f}  {c['p']:.4f}"
            )
    return 0


def cmd_assign(args) -> int:
    conditions = [c.strip().upper() for c in args.conditions.split(",") if c.strip()]
    with open(args.pretest, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise TutorError(f"{args.pretest}: no rows")
    cols = rows[0].keys()
    if "score" in cols:
        scores = {r["student"]: float(r["score"]) for r in rows}
    else:
        prefix = "pretest_" if "pretest_total_time" in cols else ""
        times = percentiles([float(r[f"{prefix}total_time"]) for r in rows])
        steps = percentiles([float(r[f"{prefix}total_steps"]) for r in rows])
        accs = percentiles([float(r[f"{prefix}accuracy"]) for r in rows])
        scores = {
            r["student"]: score(times[i], steps[i], accs[i])
            for i, r in enumerate(rows)
        }
    assignment = assign_conditions(scores, conditions, args.seed)
    out = sys.stdout
    print("student,condition", file=out)
    for student in sorted(assignment):
        print(f"{student},{assignment[student]}", file=out)
    return 0


def cmd_serve(args) -> int:
    from .network import read_snapshot
    from .service import TutorService, serve_forever

    cur = _problems_from_dir(args.curriculum)
    networks = {}
    if args.networks:
        for path in sorted(Path(args.networks).glob("*.snapshot")):
            net = read_snapshot(path)
            networks[net.problem_id] = net
    stats = {}
    if args.corpus:
        corpus_events = read_jsonl(args.corpus)
        for pid in networks:
            stats[pid] = corpus_node_stats(corpus_events, pid)
    service = TutorService(cur, networks=networks, stats=stats, log_path=args.log)
    serve_forever(service, args.port)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="logictutor", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-corpus", help="simulate students into a JSONL corpus")
    p.add_argument("--problems", help="curriculum directory (default: packaged)")
    p.add_argument("--policies", help="policy mix JSON config")
    p.add_argument("--only", help="comma-separated problem ids (default: training)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("build-network", help="fold a corpus into a value-iterated network")
    p.add_argument("--logs", required=True)
    p.add_argument("--problem", required=True)
    p.add_argument("--rewards", help="RewardConfig overrides (JSON)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_network)

    p = sub.add_parser("hint", help="query a hint for a proof state")
    p.add_argument("--network", required=True)
    p.add_argument("--state", required=True, help="comma-separated statements, oldest first")
    p.add_argument("--type", choices=["ns", "wp", "NS", "WP"], default="ns")
    p.set_defaults(func=cmd_hint)

    p = sub.add_parser("replay", help="validate and summarize a JSONL log")
    p.add_argument("--logs", required=True)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("metrics", help="per-student metrics report (CSV)")
    p.add_argument("--logs", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("assign", help="stratified condition assignment from pretest CSV")
    p.add_argument("--pretest", required=True)
    p.add_argument("--conditions", default="ns,wp")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_assign)

    p = sub.add_parser("serve", help="run the HTTP tutor service")
    p.add_argument("--curriculum", help="curriculum directory (default: packaged)")
    p.add_argument("--networks", help="directory of *.snapshot files")
    p.add_argument("--corpus", help="JSONL corpus for node coloring stats")
    p.add_argument("--log", help="append session events to this JSONL file")
    p.add_argument("--port", type=int, default=8421)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TutorError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
