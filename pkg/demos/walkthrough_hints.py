"""From raw logs to hints: the full data-driven pipeline on one problem.

Simulates four semesters' worth of students on a training problem,
builds the interaction network, runs value iteration, and asks for both
hint types at a few points along a fresh student's proof.
"""

from logictutor.formula import parse, render
from logictutor.hints import match_state, next_step_hint_at, waypoint_hint_at
from logictutor.mdp import RewardConfig, value_iterate
from logictutor.network import build_network
from logictutor.problems import load_default_curriculum
from logictutor.proof import attempt_step, new_proof
from logictutor.simulate import StudentPolicy, generate_corpus

problem = load_default_curriculum().get("train-01")
print(f"problem {problem.id}: givens {[render(g) for g in problem.givens]}, "
      f"conclusion {render(problem.conclusion)}\n")

mix = [
    (StudentPolicy("expert", p_err=0.0, beta=1.0), 10),
    (StudentPolicy("good", p_err=0.05, beta=0.8, p_giveup=0.005), 25),
    (StudentPolicy("explorer", p_err=0.15, beta=0.5, p_giveup=0.01), 25),
]
events = generate_corpus(mix, [problem], seed=42)
print(f"simulated corpus: {len(events)} events from 60 students")

net = build_network(events, problem.id)
values = value_iterate(net, RewardConfig())
print(f"network: {len(net.states)} states, {len(net.transitions)} transitions")
print(f"expected value at the start state: {values[net.initial_key]:.1f}\n")

state = new_proof(problem)
for label in ("fresh problem", "after Simp -> F", "after MP -> G&~H"):
    matched = match_state(net, state)
    ns = next_step_hint_at(net, matched.key)
    wp = waypoint_hint_at(net, matched.key)
    print(f"{label}:")
    print(f"  NS hint: {render(ns.statement):10s} (depth {ns.depth}, value {ns.value:.1f})")
    print(f"  WP hint: {render(wp.statement):10s} (depth {wp.depth}, value {wp.value:.1f})")
    if label == "fresh problem":
        given = state.find_justified(parse("I&F"))
        attempt_step(state, [given.id], "Simp", parse("F"))
    elif label == "after Simp -> F":
        f = state.find_justified(parse("F"))
        impl = state.find_justified(parse("F->(G&~H)"))
        attempt_step(state, [impl.id, f.id], "MP")
