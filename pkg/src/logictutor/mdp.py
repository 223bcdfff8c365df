"""Value iteration over an interaction network.

Goal states are worth the full goal reward.  Every other state backs up
over its outgoing add-transitions: a step costs ``step_cost``, carries an
error penalty scaled by the fraction of visits to the state that produced
errors, and discounts the successor's value.  Remove-transitions never
participate: hints must point forward.  Since add-transitions strictly
grow the statement set, the backup graph is a DAG and a reverse
topological (Gauss-Seidel) sweep converges in a couple of passes; plain
synchronous sweeps are used as a fallback if a snapshot ever contains a
cycle.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NoConvergence, TutorError
from .network import ADD, InteractionNetwork


@dataclass(frozen=True)
class RewardConfig:
    goal_reward: float = 100.0
    step_cost: float = -1.0
    error_penalty: float = -10.0
    discount: float = 0.9
    tolerance: float = 1e-6
    max_iterations: int = 10_000
    deadend_floor: float = -1000.0  # only used when discount == 1

    def __post_init__(self):
        if self.tolerance <= 0:
            raise TutorError("tolerance must be positive")
        if self.max_iterations < 1:
            raise TutorError("max_iterations must be at least 1")
        if not (0 < self.discount <= 1):
            raise TutorError("discount must lie in (0, 1]")
        if self.step_cost > 0 or self.error_penalty > 0:
            raise TutorError("step_cost and error_penalty are costs (<= 0)")

    @classmethod
    def from_json(cls, data: dict) -> "RewardConfig":
        return cls(**{k: data[k] for k in data})


def _sweep_order(net: InteractionNetwork) -> list[str] | None:
    """Reverse topological order over add-edges, or None if cyclic."""
    succs: dict[str, list[str]] = {k: [] for k in net.states}
    indegree = {k: 0 for k in net.states}
    for t in net.transitions.values():
        if t.kind != ADD:
            continue
        succs[t.src].append(t.dst)
        indegree[t.dst] += 1
    frontier = [k for k, d in indegree.items() if d == 0]
    topo: list[str] = []
    while frontier:
        k = frontier.pop()
        topo.append(k)
        for nxt in succs[k]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                frontier.append(nxt)
    if len(topo) != len(net.states):
        return None  # cycle
    topo.reverse()
    return topo


def value_iterate(
    net: InteractionNetwork, cfg: RewardConfig = RewardConfig()
) -> dict[str, float]:
    """Expected value of every observed state; fills ``net.values``."""
    if not net.states:
        raise TutorError("cannot value-iterate an empty network")
    successors: dict[str, list[str]] = {k: [] for k in net.states}
    for t in sorted(net.transitions.values(), key=lambda t: t.identity):
        if t.kind == ADD:
            successors[t.src].append(t.dst)

    values = {k: 0.0 for k in net.states}
    for k, rec in net.states.items():
        if rec.goal:
            values[k] = cfg.goal_reward

    if cfg.discount < 1:
        deadend = cfg.step_cost / (1 - cfg.discount)
    else:
        deadend = cfg.deadend_floor

    order = _sweep_order(net) or sorted(net.states)

    def backup(key: str) -> float:
        rec = net.states[key]
        if rec.goal:
            return cfg.goal_reward
        succ = successors[key]
        if not succ:
            return deadend
        err_frac = rec.errors / rec.visits if rec.visits else 0.0
        base = cfg.step_cost + cfg.error_penalty * err_frac
        return max(base + cfg.discount * values[dst] for dst in succ)

    residual = None
    for _ in range(cfg.max_iterations):
        delta = 0.0
        for key in order:
            new = backup(key)
            diff = abs(new - values[key])
            if diff > delta:
                delta = diff
            values[key] = new
        residual = delta
        if delta < cfg.tolerance:
            net.values = dict(values)
            return net.values
    raise NoConvergence(cfg.max_iterations, residual)


def value_sweep_deltas(net: InteractionNetwork, cfg: RewardConfig, sweeps: int):
    """Max value change per synchronous sweep (for convergence diagnostics)."""
    successors: dict[str, list[str]] = {k: [] for k in net.states}
    for t in net.transitions.values():
        if t.kind == ADD:
            successors[t.src].append(t.dst)
    if cfg.discount < 1:
        deadend = cfg.step_cost / (1 - cfg.discount)
    else:
        deadend = cfg.deadend_floor
    values = {
        k: (cfg.goal_reward if net.states[k].goal else 0.0) for k in net.states
    }
    deltas = []
    for _ in range(sweeps):
        nxt = {}
        for key, rec in net.states.items():
            if rec.goal:
                nxt[key] = cfg.goal_reward
                continue
            succ = successors[key]
            if not succ:
                nxt[key] = deadend
                continue
            err_frac = rec.errors / rec.visits if rec.visits else 0.0
            base = cfg.step_cost + cfg.error_penalty * err_frac
            nxt[key] = max(base + cfg.discount * values[dst] for dst in succ)
        deltas.append(max(abs(nxt[k] - values[k]) for k in values))
        values = nxt
    return deltas
