"""Regret accumulation, regret matching(+), strategy averaging, and
full-walk CFR / CFR+ solvers.

The full-walk solver computes exact counterfactual regrets with vectorized
tree passes; the per-infoset tables are kept as plain Python lists because
the Monte Carlo samplers touch them a few entries at a time.
"""

from __future__ import annotations

import numpy as np

from .game import CHANCE, GameTree, PLAYER1, StrategyProfile, edge_probs


def regret_matching(regrets) -> list[float]:
    """Distribution proportional to positive regrets; uniform if none."""
    total = 0.0
    for r in regrets:
        if r > 0.0:
            total += r
    n = len(regrets)
    if total <= 0.0:
        return [1.0 / n] * n
    return [(r / total) if r > 0.0 else 0.0 for r in regrets]


def regret_matching_matrix(cum: np.ndarray, mask: np.ndarray) -> np.ndarray:
    pos = np.where(cum > 0.0, cum, 0.0) * mask
    totals = pos.sum(axis=1, keepdims=True)
    counts = mask.sum(axis=1, keepdims=True)
    uniform = mask / counts
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(totals > 0.0, pos / totals, uniform)
    return out


class RegretTable:
    """Cumulative regrets and average-strategy accumulators per infoset."""

    def __init__(self, tree: GameTree):
        self.tree = tree
        self.cum = [[0.0] * i.num_actions for i in tree.infosets]
        self.avg = [[0.0] * i.num_actions for i in tree.infosets]
        self.iteration = 1

    def current_strategy(self, infoset: int) -> list[float]:
        return regret_matching(self.cum[infoset])

    def current_profile(self) -> StrategyProfile:
        probs = np.zeros((self.tree.num_infosets, self.tree.max_actions))
        for i, row in enumerate(self.cum):
            probs[i, : len(row)] = regret_matching(row)
        return StrategyProfile(self.tree, probs)

    def extract_average(self) -> StrategyProfile:
        """Normalized average strategy; uniform where nothing accumulated."""
        probs = np.zeros((self.tree.num_infosets, self.tree.max_actions))
        for i, row in enumerate(self.avg):
            total = sum(row)
            if total > 0.0:
                probs[i, : len(row)] = [w / total for w in row]
            else:
                probs[i, : len(row)] = 1.0 / len(row)
        return StrategyProfile(self.tree, probs)


def accumulate_regret(
    table: RegretTable, infoset: int, deltas, plus: bool
) -> None:
    row = table.cum[infoset]
    if plus:
        for a, d in enumerate(deltas):
            v = row[a] + d
            row[a] = v if v > 0.0 else 0.0
    else:
        for a, d in enumerate(deltas):
            row[a] += d


def update_average(
    table: RegretTable, infoset: int, current, weight: float
) -> None:
    row = table.avg[infoset]
    for a, p in enumerate(current):
        row[a] += weight * p


def cfr_regret_deltas(
    tree: GameTree, profile: StrategyProfile, player: int
) -> np.ndarray:
    """Exact counterfactual regret of every (infoset, action) for one player.

    Returns a (num_infosets, max_actions) array; rows of the other player
    are zero. This is the quantity the Monte Carlo estimators sample.
    """
    values, pi1, pi2, pic = _values_and_reaches(tree, profile)
    opp = (pi2 if player == PLAYER1 else pi1) * pic
    sign = 1.0 if player == PLAYER1 else -1.0

    mine = (tree.e_owner == player) & tree.e_player_mask
    flat = tree.e_flat_ia[mine]
    contrib = opp[tree.e_parent[mine]] * (
        values[tree.e_child[mine]] - values[tree.e_parent[mine]]
    )
    deltas = np.bincount(
        flat, weights=sign * contrib,
        minlength=tree.num_infosets * tree.max_actions,
    ).reshape(tree.num_infosets, tree.max_actions)
    deltas[tree.infoset_owner != player] = 0.0
    return deltas * tree.action_mask


def _values_and_reaches(tree: GameTree, profile: StrategyProfile):
    probs = edge_probs(tree, profile)
    pis = [np.ones(tree.num_nodes) for _ in range(3)]
    for lvl in tree.level_edges:
        ep, ec = tree.e_parent[lvl], tree.e_child[lvl]
        own = tree.e_owner[lvl]
        f = probs[lvl]
        for tag, pi in enumerate(pis):
            pi[ec] = pi[ep] * np.where(own == tag, f, 1.0)
    values = np.zeros(tree.num_nodes)
    values[tree.terminal_nodes] = tree.utility[tree.terminal_nodes]
    for lvl in reversed(tree.level_edges):
        values += np.bincount(
            tree.e_parent[lvl],
            weights=probs[lvl] * values[tree.e_child[lvl]],
            minlength=tree.num_nodes,
        )
    return values, pis[0], pis[1], pis[2]


class FullWalkCFR:
    """Exact CFR with optional CFR+ regret clamping, alternating updates,
    and linear averaging."""

    def __init__(
        self,
        tree: GameTree,
        plus: bool = False,
        alternating: bool | None = None,
        linear: bool | None = None,
    ):
        self.tree = tree
        self.plus = plus
        self.alternating = plus if alternating is None else alternating
        self.linear = plus if linear is None else linear
        self.cum = np.zeros((tree.num_infosets, tree.max_actions))
        self.avg = np.zeros((tree.num_infosets, tree.max_actions))
        self.iteration = 1
        self.nodes_touched = 0

    def _profile(self) -> StrategyProfile:
        return StrategyProfile(
            self.tree, regret_matching_matrix(self.cum, self.tree.action_mask)
        )

    def _update(self, player: int, profile: StrategyProfile, weight: float):
        tree = self.tree
        deltas = cfr_regret_deltas(tree, profile, player)
        rows = tree.infoset_owner == player
        if self.plus:
            self.cum[rows] = np.maximum(self.cum[rows] + deltas[rows], 0.0)
        else:
            self.cum[rows] += deltas[rows]
        pi_own = _own_reach_per_infoset(tree, profile, player)
        self.avg[rows] += (
            weight * pi_own[rows, None] * profile.probs[rows]
        )
        self.nodes_touched += tree.num_nodes

    def iterate(self) -> None:
        w = float(self.iteration) if self.linear else 1.0
        if self.alternating:
            for player in (0, 1):
                profile = self._profile()
                self._update(player, profile, w)
        else:
            profile = self._profile()
            for player in (0, 1):
                self._update(player, profile, w)
        self.iteration += 1

    def run(self, iterations: int) -> StrategyProfile:
        for _ in range(iterations):
            self.iterate()
        return self.average_profile()

    def average_profile(self) -> StrategyProfile:
        totals = self.avg.sum(axis=1, keepdims=True)
        counts = self.tree.action_mask.sum(axis=1, keepdims=True)
        uniform = self.tree.action_mask / counts
        with np.errstate(invalid="ignore", divide="ignore"):
            probs = np.where(totals > 0.0, self.avg / totals, uniform)
        return StrategyProfile(self.tree, probs * self.tree.action_mask)


def _own_reach_per_infoset(
    tree: GameTree, profile: StrategyProfile, player: int
) -> np.ndarray:
    probs = edge_probs(tree, profile)
    pi = np.ones(tree.num_nodes)
    for lvl in tree.level_edges:
        ep, ec = tree.e_parent[lvl], tree.e_child[lvl]
        f = np.where(tree.e_owner[lvl] == player, probs[lvl], 1.0)
        pi[ec] = pi[ep] * f
    return pi[tree.infoset_rep]


def run_cfr(
    tree: GameTree,
    iterations: int,
    plus: bool = False,
    alternating: bool | None = None,
) -> StrategyProfile:
    """Run full-walk CFR (or CFR+) and return the average profile."""
    return FullWalkCFR(tree, plus=plus, alternating=alternating).run(iterations)
