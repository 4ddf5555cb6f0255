"""Command-line front end: train, eval, bench, and export subcommands.

Log verbosity comes from the SWARMLAB_LOG environment variable (DEBUG,
INFO, WARNING, ...; default INFO).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Optional

from .harness import RunConfig, bench, evaluate, export_field, train

log = logging.getLogger("swarmlab")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmlab",
        description="Swarm collision-avoidance lab: train policies, "
                    "evaluate and benchmark them, export field grids.")
    sub = parser.add_subparsers(dest="mode", required=True)
    specs = [
        ("train", "train per-UAV agents and log metrics"),
        ("eval", "roll a checkpoint noise-free and export trajectories"),
        ("bench", "compare a checkpoint against the contour planner"),
        ("export", "sample the potential field of a reset scene to CSV"),
    ]
    for name, help_text in specs:
        s = sub.add_parser(name, help=help_text)
        s.add_argument("--scenario", default="2U1O",
                       help="named scenario preset (default 2U1O)")
        s.add_argument("--config", default=None, metavar="FILE",
                       help="scenario config JSON file, overrides --scenario")
        s.add_argument("--seed", type=int, default=0, help="run seed")
        s.add_argument("--episodes", type=int, default=None,
                       help="episode count for this mode")
        s.add_argument("--checkpoint", default=None, metavar="FILE",
                       help="checkpoint to resume from (train) or run (eval/bench)")
        s.add_argument("--out", default=None, metavar="DIR",
                       help="output directory (default runs/<mode>_<scenario>_s<seed>)")
        if name == "train":
            s.add_argument("--eval-interval", type=int, default=100,
                           help="episodes between checkpoints (default 100)")
            s.add_argument("--val-interval", type=int, default=None,
                           help="episodes between validation passes "
                                "(default: --eval-interval)")
            s.add_argument("--val-episodes", type=int, default=20,
                           help="validation rollouts per pass (default 20)")
            s.add_argument("--train-max-steps", type=int, default=72,
                           help="per-episode step cap during training "
                                "(default 72; 0 keeps the scenario cap)")
        if name == "export":
            s.add_argument("--resolution", type=float, default=5.0,
                           help="grid spacing in meters (default 5)")
    return parser


def _run_config(args) -> RunConfig:
    out = args.out or f"runs/{args.mode}_{args.scenario}_s{args.seed}"
    kwargs = dict(scenario=args.scenario, scenario_file=args.config,
                  mode=args.mode, seed=args.seed, out_dir=out,
                  checkpoint=args.checkpoint)
    if args.mode == "train":
        if args.episodes is not None:
            kwargs["episodes"] = args.episodes
        kwargs["eval_interval"] = args.eval_interval
        kwargs["val_interval"] = args.val_interval
        kwargs["val_episodes"] = args.val_episodes
        if args.train_max_steps is not None:
            kwargs["train_max_steps"] = (args.train_max_steps
                                         if args.train_max_steps > 0 else None)
    elif args.mode == "eval" and args.episodes is not None:
        kwargs["eval_episodes"] = args.episodes
    elif args.mode == "bench" and args.episodes is not None:
        kwargs["bench_episodes"] = args.episodes
    return RunConfig(**kwargs)


def main(argv: Optional[list] = None) -> int:
    level = os.environ.get("SWARMLAB_LOG", "INFO").upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    config = _run_config(args)

    if args.mode == "train":
        result = train(config)
        last = result.records[-1]
        log.info("trained %d episodes, final swarming return %.2f",
                 len(result.records), last.swarming_return)
        print(f"metrics: {result.metrics_path}")
        print(f"checkpoint: {result.final_checkpoint}")
        if result.best_val_success is not None:
            print(f"best checkpoint: {result.best_checkpoint} "
                  f"(validation success {result.best_val_success:.2%})")
    elif args.mode == "eval":
        result = evaluate(config)
        mean_react, _ = result.summary["reaction_seconds"]
        print(f"success rate: {result.success_rate:.2%} over "
              f"{len(result.records)} episodes")
        print(f"mean reaction: {mean_react * 1e3:.3f} ms per decision")
        print(f"metrics: {result.metrics_path}")
    elif args.mode == "bench":
        result = bench(config)
        for row in result.summary_rows:
            print(", ".join(str(c) for c in row))
        print(f"summary: {result.summary_path}")
    else:
        path = export_field(config, resolution=args.resolution)
        print(f"field grid: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
