import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cfrkit.game import (
    GameError,
    best_response_value,
    expected_utility,
    expected_values,
    exploitability,
    random_profile,
    reach_all,
    reach_probabilities,
    uniform_profile,
)
from cfrkit.games import build_game

from .oracles import (
    recursive_best_response,
    recursive_expected_value,
)

GAMES = ("tiny", "tiny_pi", "kuhn", "leduc")


@pytest.fixture(scope="module")
def trees():
    return {name: build_game(name) for name in GAMES}


def _profiles(tree, n=5):
    yield uniform_profile(tree)
    rng = np.random.default_rng(123)
    for _ in range(n):
        yield random_profile(tree, rng)


@pytest.mark.parametrize("name", GAMES)
def test_expected_value_matches_recursive_oracle(trees, name):
    tree = trees[name]
    for profile in _profiles(tree):
        fast = expected_utility(tree, profile, 0)
        slow = recursive_expected_value(tree, profile)
        assert fast == pytest.approx(slow, abs=1e-12)


@pytest.mark.parametrize("name", GAMES)
def test_expected_values_per_node(trees, name):
    tree = trees[name]
    rng = np.random.default_rng(7)
    profile = random_profile(tree, rng)
    values = expected_values(tree, profile)
    for node in range(0, tree.num_nodes, max(1, tree.num_nodes // 40)):
        assert values[node] == pytest.approx(
            recursive_expected_value(tree, profile, node), abs=1e-12
        )


@pytest.mark.parametrize("name", GAMES)
def test_best_response_matches_recursive_oracle(trees, name):
    tree = trees[name]
    for profile in _profiles(tree, n=3):
        for responder in (0, 1):
            fast = best_response_value(tree, profile, responder)
            slow = recursive_best_response(tree, profile, responder)
            assert fast == pytest.approx(slow, abs=1e-10)


@pytest.mark.parametrize("name", GAMES)
def test_exploitability_nonnegative_and_zero_only_at_nash(trees, name):
    tree = trees[name]
    for profile in _profiles(tree, n=3):
        assert exploitability(tree, profile) >= -1e-12


def test_reach_probability_decomposition(trees):
    tree = trees["kuhn"]
    rng = np.random.default_rng(11)
    profile = random_profile(tree, rng)
    pi0, pi1, pic = reach_all(tree, profile)
    for node in range(tree.num_nodes):
        total, own, rest = reach_probabilities(tree, profile, node)
        assert total == own * rest
        assert own == pytest.approx(pi0[node], abs=1e-14)
        assert rest == pytest.approx(pi1[node] * pic[node], abs=1e-14)


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=20, deadline=None)
def test_random_profile_rows_normalized(seed):
    tree = build_game("kuhn")
    profile = random_profile(tree, np.random.default_rng(seed))
    for i, info in enumerate(tree.infosets):
        row = profile.rows[i][: info.num_actions]
        assert sum(row) == pytest.approx(1.0, abs=1e-9)
        assert all(p >= 0 for p in row)


def test_terminal_reach_sums_to_one(trees):
    for tree in trees.values():
        profile = uniform_profile(tree)
        pi0, pi1, pic = reach_all(tree, profile)
        total = sum(
            pi0[n] * pi1[n] * pic[n] for n in tree.terminal_nodes
        )
        assert total == pytest.approx(1.0, abs=1e-12)


def test_profile_validation_rejects_bad_rows(trees):
    tree = trees["tiny"]
    profile = uniform_profile(tree)
    probs = profile.probs.copy()
    probs[0, 0] = 0.9  # row no longer sums to 1
    from cfrkit.game import StrategyProfile

    with pytest.raises(GameError):
        StrategyProfile(tree, probs)


def test_public_tree_is_a_tree(trees):
    for tree in trees.values():
        roots = [s for s, p in enumerate(tree.public_parent) if p < 0]
        assert roots == [tree.public_list[0]]
        # every public state reachable from the root by parent links
        for s in range(len(tree.public_parent)):
            cur, hops = s, 0
            while tree.public_parent[cur] >= 0:
                cur = tree.public_parent[cur]
                hops += 1
                assert hops <= len(tree.public_parent)
            assert cur == tree.public_list[0]


def test_infosets_do_not_span_public_states(trees):
    for tree in trees.values():
        for info in tree.infosets:
            assert len({tree.public_list[n] for n in info.members}) == 1
