"""Study-style analytics on simulated cohorts.

Runs an NS and a WP cohort through three training problems with live
hints, computes per-student metrics, and prints the hint-usage table
plus the correlations of hint usage with posttest-style performance.
"""

import statistics

from logictutor.events import group_by_session
from logictutor.hints import HintProvider
from logictutor.mdp import RewardConfig, value_iterate
from logictutor.metrics import (
    compute_metrics,
    hint_posttest_correlations,
    median_split,
    pretest_scores,
)
from logictutor.network import build_network
from logictutor.problems import load_default_curriculum
from logictutor.simulate import StudentPolicy, generate_corpus

curriculum = load_default_curriculum()
problems = [curriculum.get(p) for p in ("train-01", "train-13", "train-16")]

seed_mix = [
    (StudentPolicy("expert", p_err=0.0, beta=1.0), 8),
    (StudentPolicy("good", p_err=0.05, beta=0.8, p_giveup=0.005), 16),
    (StudentPolicy("explorer", p_err=0.15, beta=0.5, p_giveup=0.01), 16),
]
corpus = generate_corpus(seed_mix, problems, seed=42)
networks = {}
for p in problems:
    networks[p.id] = build_network(corpus, p.id)
    value_iterate(networks[p.id], RewardConfig())
provider = HintProvider(networks)

study_mix = [
    (StudentPolicy("strong", p_follow=0.95, p_err=0.05, beta=0.9), 8),
    (StudentPolicy("average", p_follow=0.8, p_err=0.12, beta=0.7, p_giveup=0.005), 8),
    (StudentPolicy("struggling", p_follow=0.6, p_err=0.25, beta=0.5, p_giveup=0.01), 8),
]
study_problems = (
    [curriculum.get("pretest-1")] + problems + curriculum.phase_problems("posttest")
)
metrics = []
for condition in ("NS", "WP"):
    events = generate_corpus(
        study_mix, study_problems, seed=7 if condition == "NS" else 8,
        condition=condition, hint_provider=provider,
    )
    for sid, evs in sorted(group_by_session(events).items()):
        metrics.append(compute_metrics(evs))

print(f"{'':24s}{'NS':>10s}{'WP':>10s}")
for name, attr in (
    ("Justification Rate %", "justification_rate"),
    ("Adoption Rate %", "adoption_rate"),
    ("Steps Until Justified", "steps_until_justified"),
    ("Total Added", "total_added"),
    ("% Unused/Total", "pct_unused_of_total"),
):
    cells = []
    for condition in ("NS", "WP"):
        group = [m for m in metrics if m.condition == condition]
        cells.append(statistics.mean(getattr(m, attr) for m in group))
    print(f"{name:24s}{cells[0]:10.1f}{cells[1]:10.1f}")

scores = pretest_scores(metrics)
split = median_split(scores)
high = sum(1 for v in split.values() if v == "High")
print(f"\nmedian split: {high} High / {len(split) - high} Low")

print("\ncorrelations of hint usage vs posttest performance:")
for row in hint_posttest_correlations(metrics):
    print(f"  {row['condition']:3s} {row['pair']:44s} r={row['r']:+.2f} p={row['p']:.3f}")
