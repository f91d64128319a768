"""Counterfactual-value variance measurement and analytical checks.

`measure_cfv_variance` freezes a strategy and a baseline, then re-samples
trajectories through every (infoset, action) pair to estimate the variance of
the counterfactual value the solver would have fed into its regret update.
`variance_bound` and `exact_variance_decomposition` evaluate the closed-form
upper bound and the exact per-level decomposition of that variance for
outcome sampling, for use against brute-force enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .baselines import BaselineStore
from .game import (
    CHANCE,
    GameError,
    GameTree,
    StrategyProfile,
    TERMINAL,
    expected_values,
    reach_all,
)
from .rng import pick


@dataclass(frozen=True)
class SamplerConfig:
    sampler: str = "os"  # "os" | "pos"
    scheme: str = "uniform"  # os only: "uniform" | "opponent_onpolicy"
    updating_player: int | None = None  # opponent_onpolicy measurement target

    def __post_init__(self):
        if self.sampler not in ("os", "pos"):
            raise GameError(f"unknown sampler {self.sampler!r}")
        if self.scheme not in ("uniform", "opponent_onpolicy"):
            raise GameError(f"unknown sampling scheme {self.scheme!r}")


@dataclass
class VarianceReport:
    pair_variance: dict = field(default_factory=dict)  # (infoset, action) -> var
    samples_per_pair: int = 0

    @property
    def mean(self) -> float:
        if not self.pair_variance:
            return 0.0
        return sum(self.pair_variance.values()) / len(self.pair_variance)


def _strategy_row(tree: GameTree, profile: StrategyProfile, node: int):
    if tree.owner_list[node] == CHANCE:
        return tree.chance_rows[node]
    return profile.rows[tree.infoset_list[node]][: tree.num_actions_list[node]]


def _sample_dist(tree, profile, node, config: SamplerConfig):
    n = tree.num_actions_list[node]
    if config.scheme == "uniform":
        return [1.0 / n] * n
    owner = tree.owner_list[node]
    if owner == CHANCE:
        return tree.chance_rows[node]
    if owner == config.updating_player:
        return [1.0 / n] * n
    return _strategy_row(tree, profile, node)


def _baseline_mix(tree, profile, store: BaselineStore, node: int) -> float:
    """Corrected value of a history no trajectory passed through: every
    action value collapses to its baseline."""
    if tree.owner_list[node] == TERMINAL:
        return tree.utility_list[node]
    sigma = _strategy_row(tree, profile, node)
    total = 0.0
    for a, p in enumerate(sigma):
        total += p * store.value(node, a)
    return total


def _os_child_value(tree, profile, store, node, config, rng) -> float:
    """Frozen outcome-sampling estimate of û^b at `node` (below the pair)."""
    if tree.owner_list[node] == TERMINAL:
        return tree.utility_list[node]
    dist = _sample_dist(tree, profile, node, config)
    k = pick(rng, dist)
    q = dist[k]
    child_val = _os_child_value(
        tree, profile, store, tree.child_rows[node][k], config, rng
    )
    sigma = _strategy_row(tree, profile, node)
    total = 0.0
    for a, p in enumerate(sigma):
        b = store.value(node, a)
        total += p * (b + (child_val - b) / q if a == k else b)
    return total


def _pos_values(tree, profile, store, state, rng) -> dict:
    """Frozen public-outcome-sampling estimates of û^b for every history of
    public state `state`."""
    members = tree.public_members[state]
    if tree.public_owner[state] == TERMINAL:
        return {n: tree.utility_list[n] for n in members}
    succ = tree.public_successors[state]
    k = int(rng.integers(len(succ)))
    q = 1.0 / len(succ)
    child_vals = _pos_values(tree, profile, store, succ[k], rng)
    out = {}
    for node in members:
        sigma = _strategy_row(tree, profile, node)
        total = 0.0
        for a, p in enumerate(sigma):
            b = store.value(node, a)
            child = tree.child_rows[node][a]
            if child in child_vals:
                total += p * (b + (child_vals[child] - b) / q)
            else:
                total += p * b
        out[node] = total
    return out


def measure_cfv_variance(
    tree: GameTree,
    frozen_profile: StrategyProfile,
    store_snapshot: BaselineStore,
    sampler_config: SamplerConfig,
    samples_per_pair: int,
    rng,
    infosets=None,
) -> VarianceReport:
    """Sample-variance of the counterfactual value of each (infoset, action).

    Each sample forces a trajectory through the pair and evaluates
    sum over h in I of pi_{-P(h)}(h) * corrected_value((ha)); the strategy and
    baseline stay frozen throughout.
    """
    if samples_per_pair < 2:
        raise GameError("need at least 2 samples per pair")
    pi0, pi1, pic = reach_all(tree, frozen_profile)
    report = VarianceReport(samples_per_pair=samples_per_pair)
    pos = sampler_config.sampler == "pos"
    infoset_ids = (
        range(tree.num_infosets) if infosets is None else infosets
    )
    for iid in infoset_ids:
        info = tree.infosets[iid]
        opp = [
            float((pi1[n] if info.owner == 0 else pi0[n]) * pic[n])
            for n in info.members
        ]
        opp_total = sum(opp)
        if sampler_config.scheme == "opponent_onpolicy":
            config = SamplerConfig("os", "opponent_onpolicy", info.owner)
        else:
            config = sampler_config
        for a in range(info.num_actions):
            samples = np.empty(samples_per_pair)
            if pos:
                target = tree.public_list[tree.child_rows[info.members[0]][a]]
                for s in range(samples_per_pair):
                    vals = _pos_values(tree, frozen_profile, store_snapshot,
                                       target, rng)
                    total = 0.0
                    for n, w in zip(info.members, opp):
                        total += w * vals[tree.child_rows[n][a]]
                    samples[s] = total
            else:
                # pick the trajectory's history within I by opponent reach
                if opp_total > 0.0:
                    h_dist = [w / opp_total for w in opp]
                else:
                    h_dist = [1.0 / len(opp)] * len(opp)
                static = [
                    _baseline_mix(tree, frozen_profile, store_snapshot,
                                  tree.child_rows[n][a])
                    for n in info.members
                ]
                for s in range(samples_per_pair):
                    j = pick(rng, h_dist)
                    total = 0.0
                    for idx, (n, w) in enumerate(zip(info.members, opp)):
                        if idx == j:
                            total += w * _os_child_value(
                                tree, frozen_profile, store_snapshot,
                                tree.child_rows[n][a], config, rng,
                            )
                        else:
                            total += w * static[idx]
                    samples[s] = total
            report.pair_variance[(iid, a)] = float(np.var(samples, ddof=1))
    return report


def _baseline_at(baseline_values, node: int, action: int, mx: int) -> float:
    if isinstance(baseline_values, BaselineStore):
        return baseline_values.value(node, action)
    return float(np.asarray(baseline_values).reshape(-1, mx)[node][action])


def variance_bound(
    tree: GameTree,
    profile: StrategyProfile,
    baseline_values,
    sampler_config: SamplerConfig,
    start: tuple[int, int],
) -> float:
    """Closed-form upper bound on Var[û^b(h,a)] under outcome sampling:
    sum over descendant pairs (h'a') of
    pi_sigma((ha),(h'a'))^2 / pi_sample(h,(h'a')) * (û((h'a')) - b(h',a'))^2.
    """
    values = expected_values(tree, profile)
    mx = tree.max_actions
    h, a = start
    total = 0.0

    def descend(node, psig, psamp):
        # node is the history after a pair already accounted for
        nonlocal total
        if tree.owner_list[node] == TERMINAL:
            return
        sigma = _strategy_row(tree, profile, node)
        dist = _sample_dist(tree, profile, node, sampler_config)
        for a2, child in enumerate(tree.child_rows[node]):
            ps = psig * sigma[a2]
            pq = psamp * dist[a2]
            if pq <= 0.0:
                continue
            d = float(values[child]) - _baseline_at(baseline_values, node, a2, mx)
            total += ps * ps / pq * d * d
            descend(child, ps, pq)

    q0 = _sample_dist(tree, profile, h, sampler_config)[a]
    if q0 <= 0.0:
        return 0.0
    child = tree.child_rows[h][a]
    d0 = float(values[child]) - _baseline_at(baseline_values, h, a, mx)
    total += d0 * d0 / q0
    descend(child, 1.0, q0)
    return total


def exact_variance_decomposition(
    tree: GameTree,
    profile: StrategyProfile,
    baseline_values,
    sampler_config: SamplerConfig,
    node: int,
) -> float:
    """Exact Var[û^b(node)] under outcome sampling, decomposed per visited
    history: sum over h' of pi_sigma(h,h')^2 / pi_sample(h,h') times the
    variance over the sampled action of (sigma/s)(û(child) - b)."""
    values = expected_values(tree, profile)
    mx = tree.max_actions
    total = 0.0

    def descend(n, psig, psamp):
        nonlocal total
        if tree.owner_list[n] == TERMINAL:
            return
        sigma = _strategy_row(tree, profile, n)
        dist = _sample_dist(tree, profile, n, sampler_config)
        m1 = 0.0
        m2 = 0.0
        for a2, child in enumerate(tree.child_rows[n]):
            if dist[a2] <= 0.0:
                continue
            x = (sigma[a2] / dist[a2]) * (
                float(values[child]) - _baseline_at(baseline_values, n, a2, mx)
            )
            m1 += dist[a2] * x
            m2 += dist[a2] * x * x
        total += psig * psig / psamp * (m2 - m1 * m1)
        for a2, child in enumerate(tree.child_rows[n]):
            if dist[a2] <= 0.0:
                continue
            descend(child, psig * sigma[a2], psamp * dist[a2])

    descend(node, 1.0, 1.0)
    return total
