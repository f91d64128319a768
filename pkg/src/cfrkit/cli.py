"""Command line entry point.

Subcommands:
  run          --config <file> --out <dir>   solver run(s), metrics.csv
  aggregate    --in <dir>... --out <file>    mean + 95% CI per checkpoint
  variance     --config <file> --out <dir>   frozen-strategy variance CSV
  bestresponse --game <name> --profile <file> exploitability of a profile

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .experiment import (
    ConfigError,
    aggregate,
    load_config,
    read_profile_csv,
    run_experiment,
    run_variance_harness,
)
from .game import GameError, best_response_value, exploitability
from .games import build_game, game_names


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cfrkit", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a multi-seed solver run")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True)

    agg = sub.add_parser("aggregate", help="merge runs into mean/CI curves")
    agg.add_argument("--in", dest="inputs", required=True, nargs="+")
    agg.add_argument("--out", required=True)

    var = sub.add_parser("variance", help="frozen-strategy cfv variance")
    var.add_argument("--config", required=True)
    var.add_argument("--out", required=True)

    br = sub.add_parser("bestresponse", help="evaluate a strategy profile")
    br.add_argument("--game", required=True, choices=sorted(game_names()))
    br.add_argument("--profile", required=True)
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = load_config(args.config)
            path = run_experiment(cfg, args.out)
            print(path)
        elif args.command == "aggregate":
            metrics = []
            for d in args.inputs:
                m = os.path.join(d, "metrics.csv") if os.path.isdir(d) else d
                if not os.path.exists(m):
                    raise GameError(f"no metrics file at {m}")
                metrics.append(m)
            aggregate(metrics, args.out)
            print(args.out)
        elif args.command == "variance":
            cfg = load_config(args.config)
            path = run_variance_harness(cfg, args.out)
            print(path)
        else:  # bestresponse
            tree = build_game(args.game)
            try:
                profile = read_profile_csv(args.profile, tree)
            except OSError as e:
                raise ConfigError(f"cannot read profile: {e}") from e
            br1 = best_response_value(tree, profile, 0)
            br2 = best_response_value(tree, profile, 1)
            print(f"best_response_p1={br1!r}")
            print(f"best_response_p2={br2!r}")
            print(f"exploitability={exploitability(tree, profile)!r}")
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (GameError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
