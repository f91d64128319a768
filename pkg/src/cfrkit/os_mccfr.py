"""Outcome-sampling MCCFR with baseline-corrected values.

One iteration samples a single root-to-terminal trajectory, computes
baseline-corrected utilities on the way back up, and turns them into
importance-weighted regret estimates. The predictive variant additionally
re-runs regret matching after each update and carries the next strategy's
value estimate up the stack, overwriting the baseline along the trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .baselines import BaselineStore
from .game import CHANCE, GameError, GameTree, PLAYER1, TERMINAL
from .rng import pick
from .solver import RegretTable, regret_matching


@dataclass(frozen=True)
class SamplingScheme:
    kind: str  # "uniform" | "opponent_onpolicy"

    def __post_init__(self):
        if self.kind not in ("uniform", "opponent_onpolicy"):
            raise GameError(f"unknown sampling scheme {self.kind!r}")


def sampling_dist(
    scheme: SamplingScheme,
    tree: GameTree,
    node: int,
    strategy: list[float],
    updating_player: int | None,
) -> list[float]:
    """Sampling distribution over the actions of a non-terminal node."""
    n = tree.num_actions_list[node]
    if scheme.kind == "uniform":
        return [1.0 / n] * n
    owner = tree.owner_list[node]
    if owner == CHANCE:
        return tree.chance_rows[node]
    if owner == updating_player:
        return [1.0 / n] * n
    return strategy


def sample_action(
    scheme: SamplingScheme,
    tree: GameTree,
    node: int,
    strategy: list[float],
    updating_player: int | None,
    rng: np.random.Generator,
) -> tuple[int, float]:
    dist = sampling_dist(scheme, tree, node, strategy, updating_player)
    k = pick(rng, dist)
    q = dist[k]
    if q <= 0.0:
        raise GameError("sampled an action with zero probability")
    return k, q


def _os_walk(
    tree: GameTree,
    table: RegretTable,
    store: BaselineStore,
    scheme: SamplingScheme,
    updating: int | None,
    rng,
    plus: bool,
    averaging: str,
    linear: bool,
    action_picker,
    trace,
    predictive: bool,
):
    """One sampled walk. Returns (value, next_value, nodes_touched); the
    next-strategy value is only meaningful for the predictive variant."""
    owner_list = tree.owner_list
    infoset_list = tree.infoset_list
    child_rows = tree.child_rows
    utility_list = tree.utility_list
    chance_rows = tree.chance_rows
    uniform_scheme = scheme.kind == "uniform"
    learned = store.kind in ("learned_history", "learned_infoset")
    t = table.iteration
    weight_t = float(t) if linear else 1.0
    counter = [0]

    def walk(node, pi0, pi1, pic, pi_samp):
        counter[0] += 1
        owner = owner_list[node]
        if owner == TERMINAL:
            u = utility_list[node]
            return u, u
        n_act = tree.num_actions_list[node]
        if owner == CHANCE:
            sigma = chance_rows[node]
            infoset = -1
        else:
            infoset = infoset_list[node]
            sigma = regret_matching(table.cum[infoset])

        do_update = owner < CHANCE and (updating is None or owner == updating)
        if do_update:
            pi_own = pi0 if owner == PLAYER1 else pi1
            if averaging == "reach":
                w = pi_own / pi_samp * weight_t
                avg_row = table.avg[infoset]
                for a in range(n_act):
                    avg_row[a] += w * sigma[a]
            else:  # literal pseudocode blend
                avg_row = table.avg[infoset]
                for a in range(n_act):
                    avg_row[a] = avg_row[a] * (t - 1) / t + sigma[a] / t

        if uniform_scheme:
            dist = [1.0 / n_act] * n_act
        elif owner == CHANCE:
            dist = sigma
        elif owner == updating:
            dist = [1.0 / n_act] * n_act
        else:
            dist = sigma
        if action_picker is None:
            k = pick(rng, dist)
        else:
            k = action_picker(node, dist)
        q = dist[k]
        if q <= 0.0:
            raise GameError("sampled an action with zero probability")

        if owner == PLAYER1:
            c0, c1, c2 = pi0 * sigma[k], pi1, pic
        elif owner == CHANCE:
            c0, c1, c2 = pi0, pi1, pic * sigma[k]
        else:
            c0, c1, c2 = pi0, pi1 * sigma[k], pic
        child = child_rows[node][k]
        v_child, v_child_next = walk(child, c0, c1, c2, pi_samp * q)

        vs = [store.value(node, a) for a in range(n_act)]
        b_k = vs[k]
        vs[k] = b_k + (v_child - b_k) / q
        v = 0.0
        for a in range(n_act):
            v += sigma[a] * vs[a]

        if do_update:
            w = (pi1 * pic if owner == PLAYER1 else pi0 * pic) / pi_samp
            if owner != PLAYER1:
                w = -w
            cum_row = table.cum[infoset]
            if plus:
                for a in range(n_act):
                    x = cum_row[a] + w * (vs[a] - v)
                    cum_row[a] = x if x > 0.0 else 0.0
            else:
                for a in range(n_act):
                    cum_row[a] += w * (vs[a] - v)

        v_next = 0.0
        if predictive:
            store.update_predictive(node, k, v_child_next)
            if owner == CHANCE:
                sigma_next = sigma
            else:
                sigma_next = regret_matching(table.cum[infoset])
            for a in range(n_act):
                v_next += sigma_next[a] * (
                    v_child_next if a == k else store.value(node, a)
                )
        elif learned:
            store.update_learned(node, k, v_child)

        if trace is not None:
            trace.append((node, tuple(vs), v))
        return v, v_next

    value, _ = walk(0, 1.0, 1.0, 1.0, 1.0)
    return value, counter[0]


def os_iteration(
    tree: GameTree,
    table: RegretTable,
    store: BaselineStore,
    scheme: SamplingScheme,
    rng=None,
    *,
    plus: bool = False,
    updates: str = "alternating",
    averaging: str = "reach",
    linear: bool = False,
    action_picker=None,
    trace=None,
    predictive: bool = False,
) -> int:
    """Run one outcome-sampling iteration; returns nodes touched.

    With alternating updates the iteration consists of one walk per player;
    with simultaneous updates a single walk updates every visited infoset.
    """
    if predictive and store.kind != "predictive":
        raise GameError("predictive iteration needs a predictive baseline store")
    if updates == "simultaneous" and scheme.kind == "opponent_onpolicy":
        raise GameError("opponent on-policy sampling requires alternating updates")
    touched = 0
    players = (0, 1) if updates == "alternating" else (None,)
    for upd in players:
        if store.kind == "oracle":
            store.refresh_oracle(table.current_profile())
        _, n = _os_walk(
            tree, table, store, scheme, upd, rng, plus, averaging, linear,
            action_picker, trace, predictive,
        )
        touched += n
    table.iteration += 1
    return touched


def os_iteration_predictive(tree, table, store, scheme, rng=None, **kwargs) -> int:
    return os_iteration(tree, table, store, scheme, rng, predictive=True, **kwargs)
