"""Extensive-form game representation.

The tree is fully materialized into flat numpy arrays at build time. Nodes
are indexed in breadth-first order, so every child index is larger than its
parent index and all histories at a given depth form a contiguous block.
Utilities are stored for player 1 only; player 2's utility is the negation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PLAYER1 = 0
PLAYER2 = 1
CHANCE = 2
TERMINAL = 3

CHANCE_SUM_TOL = 1e-12
PROFILE_SUM_TOL = 1e-9


class GameError(Exception):
    """Raised when a game definition or profile violates an invariant."""


@dataclass
class InfoSet:
    id: int
    owner: int
    members: list[int]
    num_actions: int


@dataclass
class PublicState:
    id: int
    members: list[int]
    successors: list[int] = field(default_factory=list)
    acting_owner: int = TERMINAL


class GameTree:
    """Indexed two-player zero-sum EFG with infoset and public partitions."""

    def __init__(
        self,
        owner: np.ndarray,
        parent: np.ndarray,
        parent_action: np.ndarray,
        infoset_id: np.ndarray,
        public_id: np.ndarray,
        utility: np.ndarray,
        child: np.ndarray,
        chance_probs: np.ndarray,
        infosets: list[InfoSet],
        public_states: list[PublicState],
    ):
        self.owner = owner
        self.parent = parent
        self.parent_action = parent_action
        self.infoset_id = infoset_id
        self.public_id = public_id
        self.utility = utility
        self.child = child
        self.chance_probs = chance_probs
        self.infosets = infosets
        self.public_states = public_states

        self.num_nodes = len(owner)
        self.num_infosets = len(infosets)
        self.max_actions = child.shape[1]
        self.num_actions = (child >= 0).sum(axis=1).astype(np.int64)
        self.depth = np.zeros(self.num_nodes, dtype=np.int64)
        nonroot = np.nonzero(parent >= 0)[0]
        for n in nonroot:  # parents precede children, so one pass suffices
            self.depth[n] = self.depth[parent[n]] + 1
        self.terminal_nodes = np.nonzero(owner == TERMINAL)[0]

        # Python-native mirrors for the sampling hot paths.
        self.owner_list = owner.tolist()
        self.infoset_list = infoset_id.tolist()
        self.public_list = public_id.tolist()
        self.utility_list = utility.tolist()
        self.child_rows = [
            [int(c) for c in row if c >= 0] for row in child
        ]
        self.chance_rows = [
            [float(p) for p in row[: len(self.child_rows[n])]]
            for n, row in enumerate(chance_probs)
        ]
        self.num_actions_list = self.num_actions.tolist()

        self._build_edges()
        self._build_public_links()

    # -- construction helpers -------------------------------------------------

    def _build_edges(self):
        """Flat edge arrays grouped by parent depth, for vectorized passes."""
        e_parent, e_child, e_slot = [], [], []
        for n in range(self.num_nodes):
            for a, c in enumerate(self.child_rows[n]):
                e_parent.append(n)
                e_child.append(c)
                e_slot.append(a)
        self.e_parent = np.asarray(e_parent, dtype=np.int64)
        self.e_child = np.asarray(e_child, dtype=np.int64)
        self.e_slot = np.asarray(e_slot, dtype=np.int64)
        order = np.argsort(self.depth[self.e_parent], kind="stable")
        self.e_parent = self.e_parent[order]
        self.e_child = self.e_child[order]
        self.e_slot = self.e_slot[order]
        self.e_owner = self.owner[self.e_parent]
        self.e_infoset = self.infoset_id[self.e_parent]
        self.e_chance_prob = self.chance_probs[self.e_parent, self.e_slot]
        self.e_player_mask = self.e_owner < CHANCE
        # flat (infoset, slot) index for bincount-style accumulation
        self.e_flat_ia = np.where(
            self.e_player_mask, self.e_infoset * self.max_actions + self.e_slot, 0
        )

        depths = self.depth[self.e_parent]
        self.max_depth = int(self.depth.max())
        self.level_edges = [
            np.nonzero(depths == d)[0] for d in range(self.max_depth)
        ]
        self.nodes_at_depth = [
            np.nonzero(self.depth == d)[0] for d in range(self.max_depth + 1)
        ]

        self.infoset_rep = np.array(
            [i.members[0] for i in self.infosets], dtype=np.int64
        )
        self.infoset_owner = np.array([i.owner for i in self.infosets], dtype=np.int64)
        self.infoset_num_actions = np.array(
            [i.num_actions for i in self.infosets], dtype=np.int64
        )
        self.action_mask = np.zeros((self.num_infosets, self.max_actions), dtype=bool)
        for i in self.infosets:
            self.action_mask[i.id, : i.num_actions] = True

    def _build_public_links(self):
        for s in self.public_states:
            succ = set()
            for n in s.members:
                for c in self.child_rows[n]:
                    succ.add(int(self.public_id[c]))
            s.successors = sorted(succ)
        self.public_owner = [s.acting_owner for s in self.public_states]
        self.public_members = [s.members for s in self.public_states]
        self.public_successors = [s.successors for s in self.public_states]
        # infosets contained in each public state (acting player's partition)
        self.public_infosets: list[list[int]] = [[] for _ in self.public_states]
        seen = set()
        for i in self.infosets:
            sid = int(self.public_id[i.members[0]])
            if i.id not in seen:
                self.public_infosets[sid].append(i.id)
                seen.add(i.id)
        self.public_parent = [-1] * len(self.public_states)
        for s in self.public_states:
            parents = {
                int(self.public_id[self.parent[n]])
                for n in s.members
                if self.parent[n] >= 0
            }
            if len(parents) > 1:
                raise GameError(f"public state {s.id} has multiple public parents")
            if parents:
                self.public_parent[s.id] = parents.pop()

    # -- invariant checks ------------------------------------------------------

    def validate(self):
        """Check structural invariants; raises GameError on violation."""
        if int((self.parent < 0).sum()) != 1 or self.parent[0] != -1:
            raise GameError("tree must have exactly one root at index 0")
        for n in range(self.num_nodes):
            own = self.owner_list[n]
            kids = self.child_rows[n]
            if own == TERMINAL:
                if kids:
                    raise GameError(f"terminal node {n} has children")
            else:
                if not kids:
                    raise GameError(f"non-terminal node {n} has no actions")
            if own == CHANCE:
                total = sum(self.chance_rows[n])
                if abs(total - 1.0) > CHANCE_SUM_TOL:
                    raise GameError(f"chance node {n} probabilities sum to {total}")
            for a, c in enumerate(kids):
                if self.parent[c] != n or self.parent_action[c] != a:
                    raise GameError(f"inconsistent parent link at node {c}")

        self._check_perfect_recall()
        self._check_public_partition()

    def _own_sequence(self, node: int) -> tuple:
        """Sequence of (infoset, action) pairs of the acting player above node."""
        player = self.owner_list[node]
        seq = []
        n = node
        while self.parent[n] >= 0:
            p = int(self.parent[n])
            if self.owner_list[p] == player:
                seq.append((self.infoset_list[p], int(self.parent_action[n])))
            n = p
        seq.reverse()
        return tuple(seq)

    def _check_perfect_recall(self):
        for info in self.infosets:
            seqs = set()
            for n in info.members:
                if self.owner_list[n] != info.owner:
                    raise GameError(f"infoset {info.id} mixes owners")
                if self.num_actions_list[n] != info.num_actions:
                    raise GameError(f"infoset {info.id} mixes action counts")
                seqs.add(self._own_sequence(n))
            if len(seqs) != 1:
                raise GameError(f"infoset {info.id} violates perfect recall")

    def _check_public_partition(self):
        for info in self.infosets:
            pids = {self.public_list[n] for n in info.members}
            if len(pids) != 1:
                raise GameError(f"infoset {info.id} spans public states {pids}")
        for s in self.public_states:
            owners = {self.owner_list[n] for n in s.members}
            if len(owners) != 1:
                raise GameError(f"public state {s.id} mixes acting owners")
            depths = {int(self.depth[n]) for n in s.members}
            if len(depths) != 1:
                raise GameError(f"public state {s.id} is not timeable")


class StrategyProfile:
    """Behavioral strategy for both players: one distribution per infoset."""

    def __init__(self, tree: GameTree, probs: np.ndarray):
        self.tree = tree
        self.probs = np.asarray(probs, dtype=np.float64)
        sums = self.probs.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > PROFILE_SUM_TOL):
            raise GameError("profile rows must sum to 1")
        if np.any(self.probs < -1e-15) or np.any(self.probs[~tree.action_mask] != 0):
            raise GameError("profile has negative or out-of-range probabilities")
        self.rows = self.probs.tolist()

    def action_prob(self, node: int, action: int) -> float:
        tree = self.tree
        if tree.owner_list[node] == CHANCE:
            return tree.chance_rows[node][action]
        return self.rows[tree.infoset_list[node]][action]

    def node_dist(self, node: int) -> list[float]:
        tree = self.tree
        if tree.owner_list[node] == CHANCE:
            return tree.chance_rows[node]
        n_act = tree.num_actions_list[node]
        return self.rows[tree.infoset_list[node]][:n_act]


def uniform_profile(tree: GameTree) -> StrategyProfile:
    probs = np.zeros((tree.num_infosets, tree.max_actions))
    for i in tree.infosets:
        probs[i.id, : i.num_actions] = 1.0 / i.num_actions
    return StrategyProfile(tree, probs)


def random_profile(tree: GameTree, rng: np.random.Generator) -> StrategyProfile:
    probs = np.zeros((tree.num_infosets, tree.max_actions))
    for i in tree.infosets:
        x = rng.random(i.num_actions) + 1e-3
        probs[i.id, : i.num_actions] = x / x.sum()
    return StrategyProfile(tree, probs)


def edge_probs(tree: GameTree, profile: StrategyProfile) -> np.ndarray:
    """Action probability for every edge under the profile (chance included)."""
    p = tree.e_chance_prob.copy()
    mask = tree.e_player_mask
    p[mask] = profile.probs[tree.e_infoset[mask], tree.e_slot[mask]]
    return p


def reach_probabilities(
    tree: GameTree, profile: StrategyProfile, node: int
) -> tuple[float, float, float]:
    """Reach probability of a node and its player-1 / rest decomposition.

    Returns (total, player-1 part, player-2-and-chance part) where the total
    is defined as the exact product of the two parts.
    """
    pi1 = 1.0
    rest = 1.0
    n = node
    while tree.parent[n] >= 0:
        p = int(tree.parent[n])
        prob = profile.action_prob(p, int(tree.parent_action[n]))
        if tree.owner_list[p] == PLAYER1:
            pi1 *= prob
        else:
            rest *= prob
        n = p
    return pi1 * rest, pi1, rest


def reach_all(
    tree: GameTree, profile: StrategyProfile
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-node reach contributions (player 1, player 2, chance)."""
    probs = edge_probs(tree, profile)
    pis = [np.ones(tree.num_nodes) for _ in range(3)]
    for lvl in tree.level_edges:
        ep, ec = tree.e_parent[lvl], tree.e_child[lvl]
        own = tree.e_owner[lvl]
        f = probs[lvl]
        for tag, pi in enumerate(pis):
            pi[ec] = pi[ep] * np.where(own == tag, f, 1.0)
    return pis[0], pis[1], pis[2]


def expected_values(
    tree: GameTree, profile: StrategyProfile, terminal_values: np.ndarray | None = None
) -> np.ndarray:
    """Expected utility of every node for player 1, one bottom-up pass.

    `terminal_values` overrides the terminal utilities when given (used for
    partial-utility bookkeeping in tests and baseline seeding).
    """
    values = np.zeros(tree.num_nodes)
    if terminal_values is None:
        values[tree.terminal_nodes] = tree.utility[tree.terminal_nodes]
    else:
        values[tree.terminal_nodes] = terminal_values[tree.terminal_nodes]
    probs = edge_probs(tree, profile)
    for lvl in reversed(tree.level_edges):
        ep, ec = tree.e_parent[lvl], tree.e_child[lvl]
        values += np.bincount(
            ep, weights=probs[lvl] * values[ec], minlength=tree.num_nodes
        )
    return values


def expected_utility(tree: GameTree, profile: StrategyProfile, node: int) -> float:
    return float(expected_values(tree, profile)[node])


def best_response_value(
    tree: GameTree, profile: StrategyProfile, responder: int
) -> float:
    """Expectimax value for the responder against the profile's other player."""
    pi1, pi2, pic = reach_all(tree, profile)
    opp_reach = (pi2 if responder == PLAYER1 else pi1) * pic

    sign = 1.0 if responder == PLAYER1 else -1.0
    values = np.zeros(tree.num_nodes)
    values[tree.terminal_nodes] = sign * tree.utility[tree.terminal_nodes]
    probs = edge_probs(tree, profile)

    for lvl in reversed(tree.level_edges):
        ep, ec = tree.e_parent[lvl], tree.e_child[lvl]
        own = tree.e_owner[lvl]
        passive = own != responder
        if passive.any():
            values += np.bincount(
                ep[passive],
                weights=probs[lvl][passive] * values[ec[passive]],
                minlength=tree.num_nodes,
            )
        active = ~passive
        if active.any():
            flat = tree.e_flat_ia[lvl][active]
            q = np.bincount(
                flat,
                weights=opp_reach[ep[active]] * values[ec[active]],
                minlength=tree.num_infosets * tree.max_actions,
            ).reshape(tree.num_infosets, tree.max_actions)
            q = np.where(tree.action_mask, q, -np.inf)
            best = np.argmax(q, axis=1)
            nodes = np.unique(ep[active])
            for n in nodes:
                values[n] = values[tree.child_rows[n][best[tree.infoset_list[n]]]]
    return float(values[0])


def exploitability(tree: GameTree, profile: StrategyProfile) -> float:
    """Average best-response gain against the profile; zero exactly at Nash."""
    br2 = best_response_value(tree, profile, PLAYER2)
    br1 = best_response_value(tree, profile, PLAYER1)
    return 0.5 * (br1 + br2)
