"""End-to-end acceptance suite.

Each test prints one PASS/FAIL line (visible with `pytest -s`). The figure
reproduction tests run multi-seed experiments at desk scale and take tens of
minutes combined; everything else finishes in seconds to a few minutes.
"""

import math
import statistics

import numpy as np
import pytest

from cfrkit.baselines import make_store
from cfrkit.experiment import parse_config, run_experiment
from cfrkit.game import (
    TERMINAL,
    expected_utility,
    expected_values,
    exploitability,
    random_profile,
)
from cfrkit.games import always_call_values, build_game
from cfrkit.os_mccfr import SamplingScheme, os_iteration
from cfrkit.pos_mccfr import full_walk_bootstrap, pos_iteration
from cfrkit.rng import iteration_rng, run_rng
from cfrkit.solver import RegretTable, run_cfr
from cfrkit.variance import (
    SamplerConfig,
    exact_variance_decomposition,
    measure_cfv_variance,
    variance_bound,
)

from .oracles import (
    mean_of,
    os_action_value_distribution,
    os_value_distribution,
    variance_of,
)
from .test_os import _randomized_store, _reference_plain_os

Z95 = statistics.NormalDist().inv_cdf(0.975)


def _report(name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"\nACCEPTANCE {name}: {status}" + (f"  ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


def _mean_ci(values):
    m = statistics.fmean(values)
    h = Z95 * statistics.stdev(values) / math.sqrt(len(values))
    return m, h


# -- unbiasedness --------------------------------------------------------------

def test_unbiasedness_every_pair_every_baseline():
    worst = 0.0
    for game in ("tiny", "kuhn"):
        tree = build_game(game)
        rng = np.random.default_rng(2024)
        profile = random_profile(tree, rng)
        values = expected_values(tree, profile)

        def sample_dist(node):
            n = tree.num_actions_list[node]
            return [1.0 / n] * n

        for kind in ("zero", "static", "learned_history", "learned_infoset",
                     "predictive", "oracle"):
            store = _randomized_store(tree, kind, rng)
            if kind == "oracle":
                store.refresh_oracle(profile)
            for node in range(tree.num_nodes):
                if tree.owner_list[node] == TERMINAL:
                    continue
                for a, child in enumerate(tree.child_rows[node]):
                    m = mean_of(os_action_value_distribution(
                        tree, profile, store.value, sample_dist, node, a))
                    worst = max(worst, abs(m - float(values[child])))
    _report("unbiased-corrected-values", worst <= 1e-10,
            f"max deviation {worst:.2e}")


# -- oracle baseline is exact --------------------------------------------------

def test_oracle_baseline_zero_variance_pointwise():
    tree = build_game("kuhn")
    table = RegretTable(tree)
    store = make_store(tree, "oracle")
    scheme = SamplingScheme("uniform")
    worst = 0.0
    for it in range(10_000):
        exact = expected_values(tree, table.current_profile())
        trace = []
        os_iteration(tree, table, store, scheme, iteration_rng(99, it),
                     updates="simultaneous", trace=trace)
        for node, vs, v in trace:
            for a, val in enumerate(vs):
                worst = max(worst, abs(val - exact[tree.child_rows[node][a]]))
            worst = max(worst, abs(v - exact[node]))
    _report("oracle-baseline-exact-values", worst <= 1e-9,
            f"max deviation {worst:.2e} over 1e4 iterations")


# -- predictive baseline under public sampling becomes exact -------------------

def test_predictive_pos_variance_drops_to_zero():
    tree = build_game("leduc")

    # with the full-walk bootstrap: zero variance at every checkpoint
    table = RegretTable(tree)
    store = make_store(tree, "predictive")
    full_walk_bootstrap(tree, table, store)
    worst_boot = 0.0
    for it in range(1, 301):
        pos_iteration(tree, table, store, iteration_rng(3, it),
                      predictive=True)
        if it % 100 == 0:
            rep = measure_cfv_variance(
                tree, table.current_profile(), store, SamplerConfig("pos"),
                10, iteration_rng(3, 10**9 + it))
            worst_boot = max(worst_boot, max(rep.pair_variance.values()))

    # without the bootstrap: zero variance once every terminal public state
    # has been sampled at least once
    table = RegretTable(tree)
    store = make_store(tree, "predictive")
    n_term = sum(1 for o in tree.public_owner if o == TERMINAL)
    seen: set = set()
    it = 0
    while len(seen) < n_term and it < 50_000:
        it += 1
        pos_iteration(tree, table, store, iteration_rng(4, it),
                      predictive=True, terminal_log=seen)
    covered = len(seen) == n_term
    rep = measure_cfv_variance(
        tree, table.current_profile(), store, SamplerConfig("pos"), 10,
        iteration_rng(4, 10**9))
    worst_nb = max(rep.pair_variance.values())
    ok = worst_boot <= 1e-12 and covered and worst_nb <= 1e-12
    _report("predictive-pos-zero-variance", ok,
            f"bootstrap max {worst_boot:.2e}; coverage at iter {it}, "
            f"max {worst_nb:.2e}")


# -- variance bound and exact decomposition ------------------------------------

def test_variance_bound_and_decomposition():
    tree = build_game("tiny")
    rng = np.random.default_rng(7)
    cfg = SamplerConfig("os", "uniform")

    def sample_dist(node):
        n = tree.num_actions_list[node]
        return [1.0 / n] * n

    violations = 0
    worst_eq = 0.0
    for _ in range(50):
        profile = random_profile(tree, rng)
        bvals = rng.normal(0, 2, (tree.num_nodes, tree.max_actions))
        b = lambda n, a: bvals[n][a]
        for node in range(tree.num_nodes):
            if tree.owner_list[node] == TERMINAL:
                continue
            enum_h = variance_of(os_value_distribution(
                tree, profile, b, sample_dist, node))
            dec = exact_variance_decomposition(tree, profile, bvals, cfg, node)
            worst_eq = max(worst_eq, abs(enum_h - dec))
            for a in range(tree.num_actions_list[node]):
                enum_ha = variance_of(os_action_value_distribution(
                    tree, profile, b, sample_dist, node, a))
                bound = variance_bound(tree, profile, bvals, cfg, (node, a))
                if enum_ha > bound + 1e-10:
                    violations += 1
    ok = violations == 0 and worst_eq <= 1e-10
    _report("variance-bound-and-decomposition", ok,
            f"{violations} bound violations; max equality gap {worst_eq:.2e}")


# -- zero baseline reduces to plain sampling -----------------------------------

def test_zero_baseline_reduction_10k_iterations():
    tree = build_game("kuhn")
    table = RegretTable(tree)
    store = make_store(tree, "zero")
    scheme = SamplingScheme("uniform")
    for it in range(1, 10_001):
        os_iteration(tree, table, store, scheme, iteration_rng(123, it))
    ref_cum, ref_avg = _reference_plain_os(tree, 10_000, 123)
    mismatches = 0
    for i in range(tree.num_infosets):
        for a in range(tree.infosets[i].num_actions):
            if not (table.cum[i][a] == ref_cum[i][a]
                    and table.avg[i][a] == ref_avg[i][a]):
                mismatches += 1
    _report("zero-baseline-reduction", mismatches == 0,
            f"{mismatches} differing table entries after 1e4 iterations")


# -- Leduc outcome-sampling convergence ordering --------------------------------

SERIES_SEEDS = list(range(1, 21))


def _final_exploitabilities(game, sampler, kind, iterations, seeds,
                            averaging="simple", measure=False,
                            variance_samples=40):
    text = [
        f"game={game}", "solver=mccfr", f"sampler={sampler}",
        f"baseline={kind}", f"averaging={averaging}",
        f"iterations={iterations}", "checkpoints=1",
    ]
    if measure:
        text += ["measure_variance=true", f"variance_samples={variance_samples}"]
    text += [f"seed={s}" for s in seeds]
    cfg = parse_config("\n".join(text) + "\n")
    import tempfile

    with tempfile.TemporaryDirectory() as d:
        path = run_experiment(cfg, d)
        expl, var = [], []
        for line in open(path).read().splitlines()[1:]:
            parts = line.split(",")
            expl.append(float(parts[4]))
            if parts[5] != "":
                var.append(float(parts[5]))
    return expl, var


def test_leduc_os_convergence_ordering():
    iterations = 100_000
    stats = {}
    for kind in ("none", "learned_infoset", "learned_history", "predictive",
                 "static"):
        expl, _ = _final_exploitabilities("leduc", "os", kind, iterations,
                                          SERIES_SEEDS)
        stats[kind] = _mean_ci(expl)
    none_m, none_h = stats["none"]
    li_m, _ = stats["learned_infoset"]
    group = {k: stats[k] for k in ("learned_history", "predictive", "static")}
    best_kind = min(group, key=lambda k: group[k][0])
    best_m, best_h = group[best_kind]
    ordered = none_m > li_m and all(li_m > group[k][0] for k in group)
    separated = (none_m - none_h) > (best_m + best_h)
    detail = (
        f"none {none_m:.3f}±{none_h:.3f}; infoset {li_m:.3f}; "
        + "; ".join(f"{k} {v[0]:.3f}" for k, v in group.items())
    )
    _report("leduc-os-ordering", ordered and separated, detail)


def test_shifted_leduc_learned_baselines_dominate():
    # regression constants frozen from the first verified run (seed 1,
    # 2e6 iterations): minimum observed advantage factor of any learned
    # baseline over no baseline was 4.22 (learned_history); floor set below it
    iterations = 2_000_000
    factor_floor = 4.0
    tree = build_game("leduc_shift100")
    scheme = SamplingScheme("uniform")
    finals = {}
    for kind in ("none", "learned_history", "learned_infoset", "predictive"):
        table = RegretTable(tree)
        store = make_store(tree, kind)
        for it in range(1, iterations + 1):
            os_iteration(tree, table, store, scheme, iteration_rng(1, it),
                         predictive=(kind == "predictive"))
        finals[kind] = exploitability(tree, table.extract_average())
    factors = {
        k: finals["none"] / finals[k]
        for k in ("learned_history", "learned_infoset", "predictive")
    }
    ok = all(f >= factor_floor for f in factors.values())
    _report("shifted-leduc-baseline-advantage", ok,
            "; ".join(f"{k} x{v:.1f}" for k, v in factors.items()))


def test_leduc_pos_variance_orderings():
    iterations = 10_000
    means = {}
    for kind in ("none", "static", "learned_history", "learned_infoset"):
        averaging = "exp:0.5" if kind.startswith("learned") else "simple"
        _, var = _final_exploitabilities(
            "leduc", "pos", kind, iterations, SERIES_SEEDS,
            averaging=averaging, measure=True)
        means[kind] = statistics.fmean(var)
    f_static = means["none"] / means["static"]
    f_learned = means["learned_infoset"] / means["learned_history"]
    ok = f_static >= 5.0 and f_learned >= 5.0
    _report("leduc-pos-variance-orderings", ok,
            f"none/static x{f_static:.1f}; infoset/history x{f_learned:.1f}")


# -- exact solver sanity --------------------------------------------------------

def test_exact_solver_sanity():
    kuhn = build_game("kuhn")
    profile = run_cfr(kuhn, 10_000, plus=True)
    expl_k = exploitability(kuhn, profile)
    value = expected_utility(kuhn, profile, 0)
    leduc = build_game("leduc")
    e50 = exploitability(leduc, run_cfr(leduc, 50, plus=True))
    e5000 = exploitability(leduc, run_cfr(leduc, 5000, plus=True))
    ok = (expl_k < 1e-3 and abs(value - (-1.0 / 18.0)) < 1e-3
          and e5000 <= e50 / 10.0)
    _report("exact-solver-sanity", ok,
            f"kuhn expl {expl_k:.2e}, value {value:.6f}; "
            f"leduc {e50:.3f} -> {e5000:.4f}")


# -- predictive store equals partial expected values ----------------------------

def test_predictive_store_partial_value_invariant():
    worst = 0.0
    for game in ("tiny", "kuhn"):
        tree = build_game(game)
        table = RegretTable(tree)
        store = make_store(tree, "predictive")
        sampled_terms: set = set()
        seen: set = set()
        for it in range(1, 101):
            pos_iteration(tree, table, store, iteration_rng(21, it),
                          predictive=True, terminal_log=seen)
            sampled_terms = {
                m for s in seen for m in tree.public_members[s]
            }
            profile = table.current_profile()
            tv = np.zeros(tree.num_nodes)
            for z in sampled_terms:
                tv[z] = tree.utility[z]
            partial = expected_values(tree, profile, terminal_values=tv)
            for n in range(tree.num_nodes):
                for a, c in enumerate(tree.child_rows[n]):
                    worst = max(worst, abs(store.value(n, a) - partial[c]))
    _report("predictive-partial-value-invariant", worst <= 1e-10,
            f"max deviation {worst:.2e} over 100 iterations")
