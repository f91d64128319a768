"""Public outcome sampling: a single trajectory through the public tree.

Instead of one history per step, the sampler carries every history of the
current public state, picks one successor public state uniformly at random,
and importance-corrects only across that public transition. Baseline-corrected
values are then available for all histories of the sampled public states, so
regrets of every infoset along the public trajectory are updated at once.
"""

from __future__ import annotations

from .baselines import BaselineStore
from .game import CHANCE, GameError, GameTree, PLAYER1, TERMINAL
from .solver import (
    RegretTable,
    accumulate_regret,
    cfr_regret_deltas,
    regret_matching,
)


def _pos_walk(
    tree: GameTree,
    table: RegretTable,
    store: BaselineStore,
    updating: int | None,
    rng,
    plus: bool,
    averaging: str,
    linear: bool,
    successor_picker,
    trace,
    predictive: bool,
    terminal_log,
):
    """Returns ({history: corrected value}, nodes touched); the predictive
    variant additionally carries next-strategy values per history."""
    owner_of = tree.public_owner
    members_of = tree.public_members
    succ_of = tree.public_successors
    infosets_of = tree.public_infosets
    child_rows = tree.child_rows
    infoset_list = tree.infoset_list
    chance_rows = tree.chance_rows
    kind = store.kind
    t = table.iteration
    weight_t = float(t) if linear else 1.0
    counter = [0]

    def walk(state, reach, pi_samp):
        members = members_of[state]
        counter[0] += len(members)
        owner = owner_of[state]
        if owner == TERMINAL:
            if terminal_log is not None:
                terminal_log.add(state)
            return (
                {n: tree.utility_list[n] for n in members},
                {n: tree.utility_list[n] for n in members},
            )

        # current strategy per infoset, plus average-strategy accumulation
        sigmas = {}
        do_update = owner < CHANCE and (updating is None or owner == updating)
        for infoset in infosets_of[state]:
            sigma = regret_matching(table.cum[infoset])
            sigmas[infoset] = sigma
            if do_update:
                rep = tree.infosets[infoset].members[0]
                avg_row = table.avg[infoset]
                if averaging == "reach":
                    pi_own = reach[rep][owner]
                    w = pi_own / pi_samp * weight_t
                    for a, p in enumerate(sigma):
                        avg_row[a] += w * p
                else:  # literal pseudocode blend
                    for a, p in enumerate(sigma):
                        avg_row[a] = avg_row[a] * (t - 1) / t + p / t

        def sigma_at(node):
            if owner == CHANCE:
                return chance_rows[node]
            return sigmas[infoset_list[node]]

        succ = succ_of[state]
        if successor_picker is None:
            k = int(rng.integers(len(succ)))
        else:
            k = successor_picker(state, len(succ))
        q = 1.0 / len(succ)
        sampled = succ[k]

        child_reach = {}
        for node in members:
            p0, p1, pc = reach[node]
            sigma = sigma_at(node)
            for a, child in enumerate(child_rows[node]):
                if tree.public_list[child] != sampled:
                    continue
                f = sigma[a]
                if owner == PLAYER1:
                    child_reach[child] = (p0 * f, p1, pc)
                elif owner == CHANCE:
                    child_reach[child] = (p0, p1, pc * f)
                else:
                    child_reach[child] = (p0, p1 * f, pc)

        child_vals, child_next = walk(sampled, child_reach, pi_samp * q)

        # corrected action values and strategy-mixed history values
        rows = {}
        values = {}
        sampled_actions = {node: [] for node in members}
        for node in members:
            sigma = sigma_at(node)
            vs = []
            for a, child in enumerate(child_rows[node]):
                b = store.value(node, a)
                if child in child_vals:
                    vs.append(b + (child_vals[child] - b) / q)
                    sampled_actions[node].append(a)
                else:
                    vs.append(b)
            v = 0.0
            for a, p in enumerate(sigma):
                v += p * vs[a]
            rows[node] = vs
            values[node] = v
            if trace is not None:
                trace.append((node, tuple(vs), v))

        # regret updates, one estimate per infoset of the public state
        if do_update:
            sign = 1.0 if owner == PLAYER1 else -1.0
            for infoset in infosets_of[state]:
                n_act = tree.infosets[infoset].num_actions
                deltas = [0.0] * n_act
                for node in tree.infosets[infoset].members:
                    p0, p1, pc = reach[node]
                    w = (p1 if owner == PLAYER1 else p0) * pc
                    vs = rows[node]
                    v = values[node]
                    for a in range(n_act):
                        deltas[a] += w * (vs[a] - v)
                scale = sign / pi_samp
                accumulate_regret(
                    table, infoset, [scale * d for d in deltas], plus
                )

        # baseline updates for the sampled transition
        if predictive:
            next_values = {}
            for node in members:
                for a in sampled_actions[node]:
                    store.update_predictive(node, a, child_next[child_rows[node][a]])
                if owner == CHANCE:
                    sigma_next = chance_rows[node]
                else:
                    sigma_next = regret_matching(table.cum[infoset_list[node]])
                v = 0.0
                for b_a in range(len(child_rows[node])):
                    v += sigma_next[b_a] * store.value(node, b_a)
                next_values[node] = v
            return values, next_values
        if kind == "learned_history":
            for node in members:
                for a in sampled_actions[node]:
                    store.update_learned(node, a, child_vals[child_rows[node][a]])
        elif kind == "learned_infoset":
            if owner == CHANCE:
                for node in members:
                    for a in sampled_actions[node]:
                        store.update_learned(
                            node, a, child_vals[child_rows[node][a]]
                        )
            else:
                for infoset in infosets_of[state]:
                    nodes = tree.infosets[infoset].members
                    n_act = tree.infosets[infoset].num_actions
                    opp = [
                        (reach[n][1] if owner == PLAYER1 else reach[n][0])
                        * reach[n][2]
                        for n in nodes
                    ]
                    for a in range(n_act):
                        hv, w = [], []
                        for n, o in zip(nodes, opp):
                            if a in sampled_actions[n]:
                                hv.append(child_vals[child_rows[n][a]])
                                w.append(o)
                        if hv:
                            store.update_learned_infoset_pos(infoset, a, hv, w)
        return values, values

    root_state = tree.public_list[0]
    reach0 = {0: (1.0, 1.0, 1.0)}
    vals, _ = walk(root_state, reach0, 1.0)
    return vals, counter[0]


def pos_iteration(
    tree: GameTree,
    table: RegretTable,
    store: BaselineStore,
    rng=None,
    *,
    plus: bool = False,
    updates: str = "simultaneous",
    averaging: str = "reach",
    linear: bool = False,
    successor_picker=None,
    trace=None,
    predictive: bool = False,
    terminal_log=None,
) -> int:
    """Run one public-outcome-sampling iteration; returns nodes touched."""
    if predictive and store.kind != "predictive":
        raise GameError("predictive iteration needs a predictive baseline store")
    touched = 0
    players = (0, 1) if updates == "alternating" else (None,)
    for upd in players:
        if store.kind == "oracle":
            store.refresh_oracle(table.current_profile())
        _, n = _pos_walk(
            tree, table, store, upd, rng, plus, averaging, linear,
            successor_picker, trace, predictive, terminal_log,
        )
        touched += n
    table.iteration += 1
    return touched


def full_walk_bootstrap(
    tree: GameTree, table: RegretTable, store: BaselineStore
) -> int:
    """One exact full-tree update at t=1, then seed every baseline entry with
    the resulting strategy's expected child values. Returns nodes touched."""
    if table.iteration != 1:
        raise GameError("bootstrap must run before the first sampled iteration")
    profile = table.current_profile()
    for player in (0, 1):
        deltas = cfr_regret_deltas(tree, profile, player)
        for info in tree.infosets:
            if info.owner != player:
                continue
            row = table.cum[info.id]
            avg_row = table.avg[info.id]
            pi_own = _own_reach(tree, profile, player, info.members[0])
            for a in range(info.num_actions):
                row[a] += float(deltas[info.id][a])
                avg_row[a] += pi_own * profile.rows[info.id][a]
    table.iteration = 2
    store.seed_from_profile(table.current_profile())
    return tree.num_nodes


def _own_reach(tree, profile, player, node) -> float:
    pi = 1.0
    n = node
    while tree.parent[n] >= 0:
        p = int(tree.parent[n])
        if tree.owner_list[p] == player:
            pi *= profile.action_prob(p, int(tree.parent_action[n]))
        n = p
    return pi
