"""Concrete game definitions compiled into GameTree.

Games are described by small state classes exposing the acting owner, legal
actions, infoset key (private view of the acting player), and public key
(what an outside observer sees). ``build_tree`` materializes the tree
breadth-first and groups infosets / public states by key.

Leduc rules pinned here: 6-card deck (3 ranks x 2 suits), ante 1, two
betting rounds with fixed raise sizes 2 then 4, at most two raises per
round, one public board card between the rounds. Pair with the board beats
rank; equal ranks split the pot.
"""

from __future__ import annotations

from typing import Callable, Iterable

import numpy as np

from .game import (
    CHANCE,
    GameError,
    GameTree,
    InfoSet,
    PLAYER1,
    PLAYER2,
    PublicState,
    StrategyProfile,
    TERMINAL,
    expected_values,
)


def build_tree(root_state, max_actions: int | None = None) -> GameTree:
    """Materialize a game-state tree into indexed arrays, BFS order."""
    states = [root_state]
    parent = [-1]
    parent_action = [-1]
    children: list[list[int]] = [[]]
    labels = [[str(a) for a in root_state.actions()]]
    frontier = [0]
    while frontier:
        nxt = []
        for n in frontier:
            st = states[n]
            if st.owner() == TERMINAL:
                continue
            for a in range(len(st.actions())):
                c = len(states)
                states.append(st.apply(a))
                parent.append(n)
                parent_action.append(a)
                children[n].append(c)
                children.append([])
                labels.append([str(x) for x in states[c].actions()])
                nxt.append(c)
        frontier = nxt

    num = len(states)
    owner = np.array([s.owner() for s in states], dtype=np.int64)
    if max_actions is None:
        max_actions = max((len(c) for c in children), default=1)
    child = np.full((num, max_actions), -1, dtype=np.int64)
    chance = np.zeros((num, max_actions))
    utility = np.zeros(num)
    for n, st in enumerate(states):
        for a, c in enumerate(children[n]):
            child[n, a] = c
        if owner[n] == CHANCE:
            chance[n, : len(children[n])] = st.chance_probs()
        elif owner[n] == TERMINAL:
            utility[n] = st.utility()

    infoset_id = np.full(num, -1, dtype=np.int64)
    infosets: list[InfoSet] = []
    by_key: dict = {}
    for n, st in enumerate(states):
        if owner[n] in (PLAYER1, PLAYER2):
            key = (owner[n], st.infoset_key())
            if key not in by_key:
                by_key[key] = len(infosets)
                infosets.append(
                    InfoSet(len(infosets), int(owner[n]), [], len(children[n]))
                )
            i = by_key[key]
            infoset_id[n] = i
            infosets[i].members.append(n)

    public_id = np.full(num, -1, dtype=np.int64)
    publics: list[PublicState] = []
    by_pkey: dict = {}
    for n, st in enumerate(states):
        key = st.public_key()
        if key not in by_pkey:
            by_pkey[key] = len(publics)
            publics.append(PublicState(len(publics), [], acting_owner=int(owner[n])))
        s = by_pkey[key]
        public_id[n] = s
        publics[s].members.append(n)

    tree = GameTree(
        owner=owner,
        parent=np.array(parent, dtype=np.int64),
        parent_action=np.array(parent_action, dtype=np.int64),
        infoset_id=infoset_id,
        public_id=public_id,
        utility=utility,
        child=child,
        chance_probs=chance,
        infosets=infosets,
        public_states=publics,
    )
    tree.action_labels = labels
    tree.validate()
    return tree


# ---------------------------------------------------------------------------
# Kuhn poker: deck {J,Q,K}, ante 1, single bet of 1.
# ---------------------------------------------------------------------------

class _KuhnState:
    def __init__(self, cards=(-1, -1), seq=""):
        self.cards = cards
        self.seq = seq

    def owner(self) -> int:
        if self.cards[0] < 0 or self.cards[1] < 0:
            return CHANCE
        if self.seq in ("", "cb"):
            return PLAYER1
        if self.seq in ("c", "b"):
            return PLAYER2
        return TERMINAL

    def actions(self):
        if self.owner() == CHANCE:
            if self.cards[0] < 0:
                return [0, 1, 2]
            return [c for c in (0, 1, 2) if c != self.cards[0]]
        if self.owner() == TERMINAL:
            return []
        if self.seq in ("", "c"):
            return ["check", "bet"]
        return ["fold", "call"]

    def chance_probs(self):
        n = len(self.actions())
        return [1.0 / n] * n

    def apply(self, a: int) -> "_KuhnState":
        if self.owner() == CHANCE:
            card = self.actions()[a]
            if self.cards[0] < 0:
                return _KuhnState((card, -1), self.seq)
            return _KuhnState((self.cards[0], card), self.seq)
        label = self.actions()[a]
        code = {"check": "c", "bet": "b", "fold": "f", "call": "k"}[label]
        return _KuhnState(self.cards, self.seq + code)

    def utility(self) -> float:
        seq, (c1, c2) = self.seq, self.cards
        win = 1.0 if c1 > c2 else -1.0
        if seq == "cc":
            return win
        if seq in ("bk", "cbk"):
            return 2.0 * win
        if seq == "bf":
            return 1.0
        if seq == "cbf":
            return -1.0
        raise GameError(f"not terminal: {seq}")

    def infoset_key(self):
        me = self.cards[0] if self.owner() == PLAYER1 else self.cards[1]
        return (me, self.seq)

    def public_key(self):
        dealt = (self.cards[0] >= 0) + (self.cards[1] >= 0)
        return (dealt, self.seq)


def build_kuhn() -> GameTree:
    return build_tree(_KuhnState())


# ---------------------------------------------------------------------------
# Leduc hold'em. Cards 0..5, rank = card // 2.
# ---------------------------------------------------------------------------

_LEDUC_DECK = list(range(6))
_LEDUC_RAISE = (2.0, 4.0)
_LEDUC_MAX_RAISES = 2


class _LeducState:
    __slots__ = ("cards", "board", "rounds", "pot", "folded", "shift")

    def __init__(self, cards=(-1, -1), board=-1, rounds=("",), pot=(1.0, 1.0),
                 folded=-1, shift=0.0):
        self.cards = cards
        self.board = board
        self.rounds = rounds  # betting strings, one per started round
        self.pot = pot
        self.folded = folded
        self.shift = shift

    # -- round bookkeeping --

    def _round_over(self, seq: str) -> bool:
        if seq.endswith("f"):
            return True
        if seq in ("cc",):
            return True
        # a call after at least one raise closes the round
        return len(seq) >= 2 and seq[-1] == "k"

    def _to_act(self, seq: str) -> int:
        return len(seq) % 2

    def owner(self) -> int:
        if self.folded >= 0:
            return TERMINAL
        if self.cards[0] < 0 or self.cards[1] < 0:
            return CHANCE
        seq = self.rounds[-1]
        if self._round_over(seq):
            if len(self.rounds) == 1:
                return CHANCE  # board card pending
            return TERMINAL
        return self._to_act(seq)

    def actions(self):
        own = self.owner()
        if own == TERMINAL:
            return []
        if own == CHANCE:
            if self.cards[0] < 0:
                return list(_LEDUC_DECK)
            if self.cards[1] < 0:
                return [c for c in _LEDUC_DECK if c != self.cards[0]]
            return [c for c in _LEDUC_DECK if c not in self.cards]
        seq = self.rounds[-1]
        facing_raise = seq.count("r") > 0 and seq[-1] == "r"
        acts = []
        if facing_raise:
            acts.append("fold")
        acts.append("call" if facing_raise else "check")
        if seq.count("r") < _LEDUC_MAX_RAISES:
            acts.append("raise")
        return acts

    def chance_probs(self):
        n = len(self.actions())
        return [1.0 / n] * n

    def apply(self, a: int) -> "_LeducState":
        own = self.owner()
        if own == CHANCE:
            card = self.actions()[a]
            if self.cards[0] < 0:
                return _LeducState((card, -1), -1, self.rounds, self.pot,
                                   -1, self.shift)
            if self.cards[1] < 0:
                return _LeducState((self.cards[0], card), -1, self.rounds,
                                   self.pot, -1, self.shift)
            return _LeducState(self.cards, card, self.rounds + ("",),
                               self.pot, -1, self.shift)
        label = self.actions()[a]
        seq = self.rounds[-1]
        pot = list(self.pot)
        folded = -1
        owed = max(pot) - pot[own]
        if label == "fold":
            folded = own
            code = "f"
        elif label in ("call", "check"):
            pot[own] += owed
            code = "c" if owed == 0 and seq.count("r") == 0 else "k"
        else:
            pot[own] += owed + _LEDUC_RAISE[len(self.rounds) - 1]
            code = "r"
        rounds = self.rounds[:-1] + (seq + code,)
        return _LeducState(self.cards, self.board, rounds, tuple(pot),
                           folded, self.shift)

    def _winner(self) -> int:
        c1, c2 = self.cards
        r1, r2, rb = c1 // 2, c2 // 2, self.board // 2
        if r1 == rb and r2 != rb:
            return 0
        if r2 == rb and r1 != rb:
            return 1
        if r1 > r2:
            return 0
        if r2 > r1:
            return 1
        return -1

    def utility(self) -> float:
        if self.folded >= 0:
            base = self.pot[1] if self.folded == 1 else -self.pot[0]
        else:
            w = self._winner()
            base = 0.0 if w < 0 else (self.pot[1] if w == 0 else -self.pot[0])
        return base + self.shift

    def infoset_key(self):
        me = self.cards[self.owner()]
        return (me, self.board, self.rounds)

    def public_key(self):
        dealt = (self.cards[0] >= 0) + (self.cards[1] >= 0)
        return (dealt, self.board, self.rounds)


def build_leduc(shift: float = 0.0) -> GameTree:
    return build_tree(_LeducState(shift=shift))


# ---------------------------------------------------------------------------
# TinyGame: one private card to player 1, one public action each. Small
# enough that every estimator distribution is exhaustively enumerable.
# ---------------------------------------------------------------------------

_TINY_CHANCE = (0.6, 0.4)
_TINY_PAYOFF = {
    (0, 0, 0): 1.0, (0, 0, 1): -1.0, (0, 1, 0): -2.0, (0, 1, 1): 2.0,
    (1, 0, 0): -1.0, (1, 0, 1): 2.0, (1, 1, 0): 1.0, (1, 1, 1): -2.0,
}


class _TinyState:
    def __init__(self, card=-1, a1=-1, a2=-1, observed_chance=False):
        self.card, self.a1, self.a2 = card, a1, a2
        self.observed_chance = observed_chance

    def owner(self):
        if self.card < 0:
            return CHANCE
        if self.a1 < 0:
            return PLAYER1
        if self.a2 < 0:
            return PLAYER2
        return TERMINAL

    def actions(self):
        return [] if self.owner() == TERMINAL else [0, 1]

    def chance_probs(self):
        return list(_TINY_CHANCE)

    def apply(self, a):
        if self.card < 0:
            return type(self)(a, -1, -1, self.observed_chance)
        if self.a1 < 0:
            return type(self)(self.card, a, -1, self.observed_chance)
        return type(self)(self.card, self.a1, a, self.observed_chance)

    def utility(self):
        return _TINY_PAYOFF[(self.card, self.a1, self.a2)]

    def infoset_key(self):
        if self.owner() == PLAYER1:
            return (self.card, "p1")
        return (self.a1, "p2")

    def public_key(self):
        return (self.card >= 0, self.a1, self.a2)


class _TinyPerfectInfoState(_TinyState):
    """TinyGame variant where the chance outcome is publicly observed."""

    def infoset_key(self):
        if self.owner() == PLAYER1:
            return (self.card, "p1")
        return (self.card, self.a1, "p2")

    def public_key(self):
        return (self.card, self.a1, self.a2)


def build_tiny() -> GameTree:
    return build_tree(_TinyState())


def build_tiny_perfect_info() -> GameTree:
    return build_tree(_TinyPerfectInfoState())


# ---------------------------------------------------------------------------
# Static "always call" strategy values for Leduc variants.
# ---------------------------------------------------------------------------

def always_call_profile(tree: GameTree) -> StrategyProfile:
    """Profile that always checks/calls and never bets or folds."""
    probs = np.zeros((tree.num_infosets, tree.max_actions))
    for info in tree.infosets:
        node = info.members[0]
        labels = _node_action_labels(tree, node)
        try:
            k = labels.index("call")
        except ValueError:
            try:
                k = labels.index("check")
            except ValueError:
                raise GameError(
                    f"no call/check action at infoset {info.id}"
                ) from None
        probs[info.id, k] = 1.0
    return StrategyProfile(tree, probs)


def _node_action_labels(tree: GameTree, node: int) -> list[str]:
    labels = getattr(tree, "action_labels", None)
    if labels is None:
        raise GameError("tree does not carry action labels")
    return labels[node]


def always_call_values(tree: GameTree) -> np.ndarray:
    """Expected utility of every (node, action) under the always-call profile.

    Returned as a dense (num_nodes, max_actions) array of child values.
    """
    profile = always_call_profile(tree)
    values = expected_values(tree, profile)
    table = np.zeros((tree.num_nodes, tree.max_actions))
    for n in range(tree.num_nodes):
        for a, c in enumerate(tree.child_rows[n]):
            table[n, a] = values[c]
    return table


_BUILDERS: dict[str, Callable[[], GameTree]] = {
    "kuhn": build_kuhn,
    "leduc": build_leduc,
    "leduc_shift100": lambda: build_leduc(100.0),
    "tiny": build_tiny,
    "tiny_pi": build_tiny_perfect_info,
}


def game_names() -> Iterable[str]:
    return sorted(_BUILDERS)


def build_game(name: str) -> GameTree:
    if name not in _BUILDERS:
        raise GameError(f"unknown game {name!r}; choices: {sorted(_BUILDERS)}")
    return _BUILDERS[name]()
