"""Command line entry point: ``socialbotnet {synth,tree,spam,influence,run}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .experiments import ConfigError, ExperimentConfig, run_experiment

SUBCOMMANDS = {
    "synth": "synth",
    "tree": "tree_sweep",
    "spam": "defense_compare",
    "influence": "influence_eval",
}


def build_parser():
    parser = argparse.ArgumentParser(prog="socialbotnet", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument("--seed", type=int, help="base seed (u64)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--trials", type=int, help="trials per grid cell")
    common.add_argument("--threads", type=int, help="worker processes")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("synth", parents=[common], help="write synthetic follower sets and ground-truth networks")
    sub.add_parser("tree", parents=[common], help="retweet-forest objective sweep over alpha, c, n")
    sub.add_parser("spam", parents=[common], help="spam campaign defense comparison")
    p = sub.add_parser("influence", parents=[common], help="influence scoring under botnet attack")
    p.add_argument("--edges", help="legit action graph edge list (TSV)")
    p.add_argument("--seeds-file", help="trusted seed ids, one per line")
    p.add_argument("--dataset", help="dataset label for the report")
    sub.add_parser("run", parents=[common], help="run the experiment named in --config")
    return parser


def config_from_args(args) -> ExperimentConfig:
    data = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
    elif args.command == "run":
        raise ConfigError("config", "`run` needs --config")
    if args.command in SUBCOMMANDS:
        data["experiment"] = SUBCOMMANDS[args.command]
    overrides = {"base_seed": args.seed, "out_dir": args.out, "trials": args.trials, "threads": args.threads}
    for name in ("edges", "seeds_file", "dataset"):
        overrides[name] = getattr(args, name, None)
    data.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_dict(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
        paths = run_experiment(cfg)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
