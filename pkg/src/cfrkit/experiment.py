"""Experiment runner: flat key=value run configs, multi-seed solver loops
with log-spaced evaluation checkpoints, CSV metrics, and aggregation with
normal-approximation confidence intervals."""

from __future__ import annotations

import math
import os
import statistics
from dataclasses import dataclass, field
from importlib import metadata

import numpy as np

from .baselines import BaselineStore, KINDS, make_store
from .game import GameError, exploitability
from .games import always_call_values, build_game, game_names
from .os_mccfr import SamplingScheme, os_iteration
from .pos_mccfr import full_walk_bootstrap, pos_iteration
from .rng import iteration_rng
from .solver import FullWalkCFR, RegretTable
from .variance import SamplerConfig, measure_cfv_variance


class ConfigError(Exception):
    pass


METRICS_HEADER = (
    "run_id,seed,iteration,nodes_touched,exploitability,mean_cfv_variance"
)

_BASELINE_KEYS = ("none",) + KINDS


@dataclass
class RunConfig:
    game: str = "kuhn"
    solver: str = "mccfr"  # cfr | cfrplus | mccfr
    sampler: str = "os"  # os | pos (mccfr only)
    baseline: str = "none"
    averaging: str = "simple"  # simple | exp:<alpha>
    scheme: str = "uniform"  # uniform | opponent_onpolicy (os only)
    updates: str = ""  # alternating | simultaneous; default per sampler
    iterations: int = 1000
    checkpoints: int = 15
    seeds: list[int] = field(default_factory=lambda: [1])
    bootstrap: bool = False
    measure_variance: bool = False
    variance_samples: int = 100
    save_profile: bool = False

    def validate(self) -> None:
        if self.game not in game_names():
            raise ConfigError(f"unknown game {self.game!r}")
        if self.solver not in ("cfr", "cfrplus", "mccfr"):
            raise ConfigError(f"unknown solver {self.solver!r}")
        if self.sampler not in ("os", "pos"):
            raise ConfigError(f"unknown sampler {self.sampler!r}")
        if self.baseline not in _BASELINE_KEYS:
            raise ConfigError(f"unknown baseline {self.baseline!r}")
        if self.scheme not in ("uniform", "opponent_onpolicy"):
            raise ConfigError(f"unknown sampling scheme {self.scheme!r}")
        if self.updates not in ("", "alternating", "simultaneous"):
            raise ConfigError(f"unknown updates mode {self.updates!r}")
        if self.solver != "mccfr":
            if self._explicit_sampler:
                raise ConfigError("sampler only applies to solver=mccfr")
            if self.baseline != "none":
                raise ConfigError("baselines only apply to solver=mccfr")
        if self.sampler == "pos" and self.scheme == "opponent_onpolicy":
            raise ConfigError(
                "opponent on-policy sampling is an outcome-sampling scheme"
            )
        if self.scheme == "opponent_onpolicy" and self.updates == "simultaneous":
            raise ConfigError(
                "opponent on-policy sampling requires alternating updates"
            )
        if self.bootstrap and not (
            self.sampler == "pos" and self.baseline == "predictive"
        ):
            raise ConfigError("bootstrap needs sampler=pos baseline=predictive")
        if self.averaging != "simple":
            if not self.averaging.startswith("exp:"):
                raise ConfigError("averaging must be simple or exp:<alpha>")
            try:
                alpha = float(self.averaging[4:])
            except ValueError as e:
                raise ConfigError("bad exp averaging coefficient") from e
            if not 0.0 < alpha <= 1.0:
                raise ConfigError("exp averaging coefficient must be in (0,1]")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.checkpoints < 1:
            raise ConfigError("checkpoints must be >= 1")
        if not self.seeds:
            raise ConfigError("at least one seed required")
        if self.variance_samples < 2:
            raise ConfigError("variance_samples must be >= 2")

    @property
    def _explicit_sampler(self) -> bool:
        return getattr(self, "_sampler_set", False)

    def effective_updates(self) -> str:
        if self.updates:
            return self.updates
        # paper defaults: alternating for os, simultaneous for pos
        return "alternating" if self.sampler == "os" else "simultaneous"

    def store_averaging(self):
        if self.averaging == "simple":
            return "simple"
        return float(self.averaging[4:])

    def lines(self) -> list[str]:
        out = [
            f"game={self.game}",
            f"solver={self.solver}",
        ]
        if self.solver == "mccfr":
            out += [
                f"sampler={self.sampler}",
                f"baseline={self.baseline}",
                f"averaging={self.averaging}",
                f"scheme={self.scheme}",
                f"updates={self.effective_updates()}",
                f"bootstrap={'true' if self.bootstrap else 'false'}",
            ]
        out += [
            f"iterations={self.iterations}",
            f"checkpoints={self.checkpoints}",
            f"measure_variance={'true' if self.measure_variance else 'false'}",
            f"variance_samples={self.variance_samples}",
            f"save_profile={'true' if self.save_profile else 'false'}",
        ]
        out += [f"seed={s}" for s in self.seeds]
        return out


def parse_config(text: str) -> RunConfig:
    cfg = RunConfig(seeds=[])
    seen_sampler = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        try:
            if key == "seed":
                cfg.seeds.append(int(value))
            elif key in ("game", "solver", "baseline", "averaging",
                         "scheme", "updates"):
                setattr(cfg, key, value)
            elif key == "sampler":
                cfg.sampler = value
                seen_sampler = True
            elif key in ("iterations", "checkpoints", "variance_samples"):
                setattr(cfg, key, int(value))
            elif key in ("bootstrap", "measure_variance", "save_profile"):
                if value not in ("true", "false"):
                    raise ConfigError(f"line {lineno}: {key} must be true/false")
                setattr(cfg, key, value == "true")
            elif key == "version":
                pass  # manifests carry the code version; accepted on re-ingest
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as e:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from e
    if not cfg.seeds:
        cfg.seeds = [1]
    cfg._sampler_set = seen_sampler
    cfg.validate()
    return cfg


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    return parse_config(text)


def checkpoint_grid(iterations: int, count: int) -> list[int]:
    """Log-spaced iteration numbers, deduplicated, always ending at the last
    iteration."""
    if count == 1 or iterations == 1:
        return [iterations]
    pts = np.logspace(0.0, math.log10(iterations), count)
    grid = sorted({int(round(p)) for p in pts})
    grid = [g for g in grid if 1 <= g <= iterations]
    if grid[-1] != iterations:
        grid.append(iterations)
    return grid


def _fmt(x: float) -> str:
    return repr(float(x))


class _MccfrRun:
    def __init__(self, cfg: RunConfig, tree, seed: int):
        self.cfg = cfg
        self.tree = tree
        self.seed = seed
        self.table = RegretTable(tree)
        static = always_call_values(tree) if cfg.baseline == "static" else None
        self.store = make_store(
            tree, cfg.baseline, averaging=cfg.store_averaging(),
            static_table=static,
        )
        self.scheme = SamplingScheme(cfg.scheme)
        self.updates = cfg.effective_updates()
        self.nodes = 0
        if cfg.bootstrap:
            self.nodes += full_walk_bootstrap(tree, self.table, self.store)

    def iterate(self) -> None:
        it = self.table.iteration
        rng = iteration_rng(self.seed, it)
        predictive = self.cfg.baseline == "predictive"
        if self.cfg.sampler == "os":
            self.nodes += os_iteration(
                self.tree, self.table, self.store, self.scheme, rng,
                updates=self.updates, predictive=predictive,
            )
        else:
            self.nodes += pos_iteration(
                self.tree, self.table, self.store, rng,
                updates=self.updates, predictive=predictive,
            )

    def checkpoint_metrics(self, iteration: int):
        expl = exploitability(self.tree, self.table.extract_average())
        var = ""
        if self.cfg.measure_variance:
            cfg = SamplerConfig(self.cfg.sampler, self.cfg.scheme)
            rng = iteration_rng(self.seed, 10**9 + iteration)
            rep = measure_cfv_variance(
                self.tree, self.table.current_profile(), self.store, cfg,
                self.cfg.variance_samples, rng,
            )
            var = _fmt(rep.mean)
        return expl, var


class _ExactRun:
    def __init__(self, cfg: RunConfig, tree, seed: int):
        self.tree = tree
        plus = cfg.solver == "cfrplus"
        self.solver = FullWalkCFR(tree, plus=plus)

    def iterate(self) -> None:
        self.solver.iterate()

    @property
    def nodes(self) -> int:
        return self.solver.nodes_touched

    @property
    def table(self):
        return self.solver

    def checkpoint_metrics(self, iteration: int):
        return exploitability(self.tree, self.solver.average_profile()), ""


def run_experiment(cfg: RunConfig, out_dir: str) -> str:
    """Execute every seed of the config; writes metrics.csv and manifest in
    out_dir and returns the metrics path."""
    cfg.validate()
    os.makedirs(out_dir, exist_ok=True)
    grid = checkpoint_grid(cfg.iterations, cfg.checkpoints)
    rows = []
    for seed in cfg.seeds:
        tree = build_game(cfg.game)
        run = (
            _MccfrRun(cfg, tree, seed) if cfg.solver == "mccfr"
            else _ExactRun(cfg, tree, seed)
        )
        run_id = _run_id(cfg, seed)
        grid_iter = iter(grid)
        next_cp = next(grid_iter)
        for it in range(1, cfg.iterations + 1):
            run.iterate()
            if it == next_cp:
                expl, var = run.checkpoint_metrics(it)
                rows.append(
                    f"{run_id},{seed},{it},{run.nodes},{_fmt(expl)},{var}"
                )
                next_cp = next(grid_iter, None)
        if cfg.save_profile:
            _write_profile(
                os.path.join(out_dir, f"avg_profile_seed{seed}.csv"),
                tree,
                (run.table.extract_average() if cfg.solver == "mccfr"
                 else run.solver.average_profile()),
            )
    metrics = os.path.join(out_dir, "metrics.csv")
    with open(metrics, "w", encoding="utf-8", newline="\n") as f:
        f.write(METRICS_HEADER + "\n")
        f.write("\n".join(rows) + "\n")
    with open(os.path.join(out_dir, "manifest"), "w", encoding="utf-8") as f:
        f.write("\n".join(cfg.lines() + [f"version={_version()}"]) + "\n")
    return metrics


def _run_id(cfg: RunConfig, seed: int) -> str:
    parts = [cfg.game, cfg.solver]
    if cfg.solver == "mccfr":
        parts += [cfg.sampler, cfg.baseline]
    return "-".join(parts) + f"-s{seed}"


def _version() -> str:
    try:
        return metadata.version("cfrkit")
    except metadata.PackageNotFoundError:
        return "unknown"


def _write_profile(path: str, tree, profile) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("infoset,action,prob\n")
        for i, info in enumerate(tree.infosets):
            for a in range(info.num_actions):
                f.write(f"{i},{a},{_fmt(profile.rows[i][a])}\n")


def read_profile_csv(path: str, tree):
    from .game import StrategyProfile

    probs = np.zeros((tree.num_infosets, tree.max_actions))
    with open(path, encoding="utf-8") as f:
        header = f.readline().strip()
        if header != "infoset,action,prob":
            raise GameError(f"unexpected profile header {header!r}")
        for line in f:
            line = line.strip()
            if not line:
                continue
            i, a, p = line.split(",")
            probs[int(i), int(a)] = float(p)
    return StrategyProfile(tree, probs)


AGGREGATE_HEADER = (
    "iteration,nodes_touched,exploitability,exploitability_ci,"
    "mean_cfv_variance,mean_cfv_variance_ci"
)

_Z95 = statistics.NormalDist().inv_cdf(0.975)


def _mean_ci(values: list[float]) -> tuple[float, float]:
    m = statistics.fmean(values)
    if len(values) < 2:
        return m, 0.0
    half = _Z95 * statistics.stdev(values) / math.sqrt(len(values))
    return m, half


def aggregate(metrics_paths: list[str], out_path: str) -> None:
    """Merge per-run metrics into per-checkpoint means and 95% CI half-widths
    (normal approximation across seeds)."""
    by_run: dict[tuple[str, str, str], list[list[str]]] = {}
    for path in metrics_paths:
        with open(path, encoding="utf-8") as f:
            header = f.readline().strip()
            if header != METRICS_HEADER:
                raise GameError(f"{path}: unexpected header {header!r}")
            for line in f:
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                by_run.setdefault((path, parts[0], parts[1]), []).append(parts)
    if len(by_run) < 2:
        raise GameError("aggregation needs at least 2 runs")
    grids = {tuple(r[2] for r in rows) for rows in by_run.values()}
    if len(grids) != 1:
        raise GameError("runs have mismatched checkpoint grids")
    runs = list(by_run.values())
    out_lines = [AGGREGATE_HEADER]
    for ci in range(len(runs[0])):
        rows = [run[ci] for run in runs]
        it = rows[0][2]
        nodes = statistics.fmean(float(r[3]) for r in rows)
        em, eh = _mean_ci([float(r[4]) for r in rows])
        vs = [float(r[5]) for r in rows if r[5] != ""]
        if vs:
            vm, vh = _mean_ci(vs)
            vcol = f"{_fmt(vm)},{_fmt(vh)}"
        else:
            vcol = ","
        out_lines.append(f"{it},{_fmt(nodes)},{_fmt(em)},{_fmt(eh)},{vcol}")
    with open(out_path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(out_lines) + "\n")


def run_variance_harness(cfg: RunConfig, out_dir: str) -> str:
    """Train the configured sampler for cfg.iterations with the first seed,
    freeze strategy and baseline, and emit a per-pair variance CSV."""
    cfg.validate()
    if cfg.solver != "mccfr":
        raise ConfigError("variance harness needs solver=mccfr")
    os.makedirs(out_dir, exist_ok=True)
    seed = cfg.seeds[0]
    tree = build_game(cfg.game)
    run = _MccfrRun(cfg, tree, seed)
    for _ in range(cfg.iterations):
        run.iterate()
    rep = measure_cfv_variance(
        tree,
        run.table.current_profile(),
        run.store,
        SamplerConfig(cfg.sampler, cfg.scheme),
        cfg.variance_samples,
        iteration_rng(seed, 10**9),
    )
    path = os.path.join(out_dir, "variance.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("infoset_id,action,variance\n")
        for (i, a), v in sorted(rep.pair_variance.items()):
            f.write(f"{i},{a},{_fmt(v)}\n")
        f.write(f"mean,,{_fmt(rep.mean)}\n")
    return path
