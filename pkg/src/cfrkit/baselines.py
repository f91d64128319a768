"""Baseline functions b(h, a) and the baseline-corrected value recursion.

A baseline estimates the expected utility of taking action `a` at history
`h` under the current strategy. Subtracting it from the sampled child value
and adding it back in expectation is a control variate: the estimate stays
unbiased for any baseline, and its variance shrinks as the baseline
approaches the true action values.

Kinds:
  zero            -- constant 0; recovers plain outcome-sampling MCCFR.
  static          -- precomputed values of a fixed, known strategy profile.
  learned_history -- running average of sampled values per (history, action).
  learned_infoset -- running average per (acting player's infoset, action);
                     chance histories fall back to per-history entries.
  predictive      -- overwritten along the trajectory with the next
                     strategy's sampled value estimate.
  oracle          -- true expected values, recomputed each iteration
                     (test-only; zero-variance estimates by construction).
"""

from __future__ import annotations

import numpy as np

from .game import CHANCE, GameError, GameTree, StrategyProfile, expected_values

KINDS = ("zero", "static", "learned_history", "learned_infoset",
         "predictive", "oracle")


def corrected_value(
    b: float, child_estimate: float, sampled: bool, sample_prob: float
) -> float:
    """Baseline-corrected sampled utility of one (history, action) pair."""
    if not sampled:
        return b
    if sample_prob <= 0.0:
        raise GameError("sampled action must have positive sampling probability")
    return b + (child_estimate - b) / sample_prob

def mix_by_strategy(action_values, strategy) -> float:
    total = 0.0
    for v, p in zip(action_values, strategy):
        total += v * p
    return total


class BaselineStore:
    """State of one baseline function during a solver run.

    Learned entries default to 0; `averaging` is either "simple" (running
    mean over the timesteps the entry was sampled) or an exponential-decay
    coefficient alpha in (0, 1].
    """

    def __init__(
        self,
        tree: GameTree,
        kind: str,
        averaging: str | float = "simple",
        static_table: np.ndarray | None = None,
    ):
        if kind not in KINDS:
            raise GameError(f"unknown baseline kind {kind!r}")
        self.tree = tree
        self.kind = kind
        self.alpha = None if averaging == "simple" else float(averaging)
        if self.alpha is not None and not 0.0 < self.alpha <= 1.0:
            raise GameError("exponential averaging needs alpha in (0, 1]")
        mx = tree.max_actions
        if kind in ("learned_history", "predictive", "learned_infoset"):
            self.hist_values = [0.0] * (tree.num_nodes * mx)
            self.hist_counts = [0] * (tree.num_nodes * mx)
        if kind == "learned_infoset":
            self.inf_values = [0.0] * (tree.num_infosets * mx)
            self.inf_counts = [0] * (tree.num_infosets * mx)
        if kind == "static":
            if static_table is None:
                raise GameError("static baseline needs a value table")
            self.static_flat = np.asarray(static_table).reshape(-1).tolist()
        if kind == "oracle":
            self.oracle_node_values: list[float] | None = None

    # -- reads ---------------------------------------------------------------

    def value(self, node: int, action: int) -> float:
        kind = self.kind
        if kind == "zero":
            return 0.0
        mx = self.tree.max_actions
        if kind == "learned_infoset":
            if self.tree.owner_list[node] == CHANCE:
                return self.hist_values[node * mx + action]
            return self.inf_values[self.tree.infoset_list[node] * mx + action]
        if kind in ("learned_history", "predictive"):
            return self.hist_values[node * mx + action]
        if kind == "static":
            return self.static_flat[node * mx + action]
        if self.oracle_node_values is None:
            raise GameError("oracle baseline not refreshed this iteration")
        return self.oracle_node_values[self.tree.child_rows[node][action]]

    def baseline_value(self, node: int, action: int, updating_player: int) -> float:
        # augmented infosets of the non-actor are not materialized; infoset
        # keying always uses the acting player's infoset (see value()).
        return self.value(node, action)

    # -- writes --------------------------------------------------------------

    def _average_into(self, values, counts, idx: int, sample: float) -> None:
        if self.alpha is None:
            c = counts[idx] + 1
            counts[idx] = c
            values[idx] += (sample - values[idx]) / c
        else:
            values[idx] = values[idx] * (1.0 - self.alpha) + self.alpha * sample

    def update_learned(self, node: int, action: int, sample_value: float) -> None:
        """Feed one sampled child value into a learned baseline entry."""
        mx = self.tree.max_actions
        if self.kind == "learned_infoset" and self.tree.owner_list[node] != CHANCE:
            idx = self.tree.infoset_list[node] * mx + action
            self._average_into(self.inf_values, self.inf_counts, idx, sample_value)
        else:
            idx = node * mx + action
            self._average_into(self.hist_values, self.hist_counts, idx, sample_value)

    def update_predictive(self, node: int, action: int,
                          next_strategy_estimate: float) -> None:
        self.hist_values[node * self.tree.max_actions + action] = (
            next_strategy_estimate
        )

    def update_learned_infoset_pos(
        self, infoset: int, action: int, history_values, opponent_reaches
    ) -> None:
        """Infoset-baseline update when a whole public state was evaluated:
        the sample is the opponent-reach-weighted mean over the infoset's
        histories, matching the weighting of the counterfactual regret."""
        denom = 0.0
        num = 0.0
        for v, w in zip(history_values, opponent_reaches):
            num += w * v
            denom += w
        if denom <= 0.0:
            return
        idx = infoset * self.tree.max_actions + action
        self._average_into(self.inf_values, self.inf_counts, idx, num / denom)

    def refresh_oracle(self, profile: StrategyProfile) -> None:
        """Recompute exact expected values for the oracle baseline."""
        self.oracle_node_values = expected_values(self.tree, profile).tolist()

    def seed_from_profile(self, profile: StrategyProfile) -> None:
        """Smart initialization: seed learned entries with a known profile's
        expected values via one full walk."""
        values = expected_values(self.tree, profile)
        mx = self.tree.max_actions
        for n in range(self.tree.num_nodes):
            for a, c in enumerate(self.tree.child_rows[n]):
                if self.kind in ("learned_history", "predictive"):
                    self.hist_values[n * mx + a] = float(values[c])
                elif self.kind == "learned_infoset":
                    if self.tree.owner_list[n] == CHANCE:
                        self.hist_values[n * mx + a] = float(values[c])
                    else:
                        self.inf_values[
                            self.tree.infoset_list[n] * mx + a
                        ] = float(values[c])


def make_store(
    tree: GameTree,
    kind: str,
    averaging: str | float = "simple",
    static_table: np.ndarray | None = None,
) -> BaselineStore:
    if kind == "none":
        kind = "zero"
    return BaselineStore(tree, kind, averaging=averaging, static_table=static_table)
