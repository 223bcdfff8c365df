"""CLI subcommands: pipelines, determinism, exit codes."""

import json
import subprocess
import sys

import pytest

from logictutor.cli import main


def run_cli(*args):
    return main(list(args))


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """gen-corpus + build-network artifacts shared by the read-only tests."""
    root = tmp_path_factory.mktemp("cli")
    corpus = root / "corpus.jsonl"
    snapshot = root / "train-01.snapshot"
    assert run_cli("gen-corpus", "--only", "train-01", "--seed", "42",
                   "--out", str(corpus)) == 0
    assert run_cli("build-network", "--logs", str(corpus),
                   "--problem", "train-01", "--out", str(snapshot)) == 0
    return root, corpus, snapshot


def test_gen_corpus_deterministic(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert run_cli("gen-corpus", "--only", "intro-3", "--seed", "7", "--out", str(a)) == 0
    assert run_cli("gen-corpus", "--only", "intro-3", "--seed", "7", "--out", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_build_network_deterministic(pipeline, tmp_path):
    root, corpus, snapshot = pipeline
    again = tmp_path / "again.snapshot"
    assert run_cli("build-network", "--logs", str(corpus),
                   "--problem", "train-01", "--out", str(again)) == 0
    assert again.read_bytes() == snapshot.read_bytes()


def test_hint_output_format(pipeline, capsys):
    root, corpus, snapshot = pipeline
    assert run_cli("hint", "--network", str(snapshot),
                   "--state", "I&F,F->(G&~H),(I&~H)->(J&K)", "--type", "ns") == 0
    out = capsys.readouterr().out.strip()
    import re

    assert re.fullmatch(r"F \(depth 1, value \d+\.\d\)", out), out


def test_hint_on_chain_network_prints_value_89(tmp_path, capsys):
    # A three-state chain (givens -> F -> goal) with default rewards puts
    # the F successor at exactly -1 + 0.9*100 = 89.0.
    from logictutor.mdp import RewardConfig, value_iterate
    from logictutor.network import InteractionNetwork, write_snapshot

    net = InteractionNetwork("chain", "G&~H", "I&F", ("MP", "Simp"))
    net.state("I&F").visits = 2
    s1 = net.state("F,I&F")
    s1.visits = 2
    goal = net.state("F,G&~H,I&F")
    goal.visits = 2
    goal.correct_freq = 2
    net.bump_transition("I&F", "F,I&F", "add", "Simp", "F").freq = 2
    net.bump_transition("F,I&F", "F,G&~H,I&F", "add", "MP", "G&~H").freq = 2
    value_iterate(net, RewardConfig())
    snap = tmp_path / "chain.snapshot"
    write_snapshot(net, snap)
    assert run_cli("hint", "--network", str(snap), "--state", "I&F", "--type", "ns") == 0
    assert capsys.readouterr().out.strip() == "F (depth 1, value 89.0)"


def test_metrics_on_ideal_ns_logs_reports_suj_one(pipeline, tmp_path):
    # Hint-following logs from an ideal student: every Next-Step hint is
    # justified in exactly one step, and the CSV says so.
    import csv

    from logictutor.events import write_jsonl
    from logictutor.hints import HintProvider
    from logictutor.network import read_snapshot
    from logictutor.problems import load_default_curriculum
    from logictutor.simulate import StudentPolicy, simulate_attempt

    root, corpus, snapshot = pipeline
    net = read_snapshot(snapshot)
    provider = HintProvider({"train-01": net})
    problem = load_default_curriculum().get("train-01")
    events = []
    for seed in range(4):
        events.extend(
            simulate_attempt(
                StudentPolicy("ideal", p_follow=1.0, p_err=0.0, beta=1.0, seed=seed),
                problem,
                condition="NS",
                hint_provider=provider,
            )
        )
    logs = tmp_path / "ideal-ns.jsonl"
    write_jsonl(events, logs)
    out_csv = tmp_path / "ideal-ns.csv"
    assert run_cli("metrics", "--logs", str(logs), "--out", str(out_csv)) == 0
    with open(out_csv, newline="") as fh:
        rows = [r for r in csv.DictReader(fh) if float(r["total_added"]) > 0]
    assert rows
    for row in rows:
        assert float(row["steps_until_justified"]) == 1.0


def test_metrics_deterministic(pipeline, tmp_path):
    root, corpus, snapshot = pipeline
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli("metrics", "--logs", str(corpus), "--out", str(a)) == 0
    assert run_cli("metrics", "--logs", str(corpus), "--out", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_hint_wp(pipeline, capsys):
    root, corpus, snapshot = pipeline
    assert run_cli("hint", "--network", str(snapshot),
                   "--state", "I&F,F->(G&~H),(I&~H)->(J&K)", "--type", "wp") == 0
    out = capsys.readouterr().out.strip()
    assert out.startswith("G&~H (depth 2, value ")


def test_replay_command(pipeline, capsys):
    root, corpus, snapshot = pipeline
    assert run_cli("replay", "--logs", str(corpus)) == 0
    out = capsys.readouterr().out
    assert "replayed" in out and "complete" in out


def test_metrics_command(pipeline, tmp_path, capsys):
    root, corpus, snapshot = pipeline
    out_csv = tmp_path / "metrics.csv"
    assert run_cli("metrics", "--logs", str(corpus), "--out", str(out_csv)) == 0
    header = out_csv.read_text().splitlines()[0]
    assert header.startswith("student,condition,split,pretest_total_time")


def test_assign_command(tmp_path, capsys):
    csv_path = tmp_path / "pretest.csv"
    lines = ["student,total_time,total_steps,accuracy"]
    import random

    rng = random.Random(4)
    for i in range(143):
        lines.append(f"s{i:03d},{rng.uniform(1, 12):.2f},{rng.randint(4, 40)},{rng.uniform(40, 95):.1f}")
    csv_path.write_text("\n".join(lines) + "\n")
    assert run_cli("assign", "--pretest", str(csv_path),
                   "--conditions", "ns,wp", "--seed", "5") == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert out[0] == "student,condition"
    conditions = [line.split(",")[1] for line in out[1:]]
    assert sorted([conditions.count("NS"), conditions.count("WP")]) == [71, 72]


def test_empty_corpus_is_data_error(tmp_path, capsys):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    code = run_cli("build-network", "--logs", str(empty),
                   "--problem", "train-01", "--out", str(tmp_path / "x.snapshot"))
    assert code == 2
    assert "EmptyCorpus" in capsys.readouterr().err


def test_usage_error_exit_code():
    proc = subprocess.run(
        [sys.executable, "-m", "logictutor.cli", "no-such-command"],
        capture_output=True,
    )
    assert proc.returncode == 1


def test_unknown_problem_is_data_error(pipeline, capsys):
    root, corpus, snapshot = pipeline
    code = run_cli("build-network", "--logs", str(corpus),
                   "--problem", "missing", "--out", str(root / "y.snapshot"))
    assert code == 2
