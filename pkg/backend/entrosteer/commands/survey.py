"""`survey`: violation fractions over Hilbert–Schmidt random two-qubit states."""

import argparse

from entrosteer.commands.common import Artifact, csv_rows, run_config
from entrosteer.models.schemas import RunConfig
from entrosteer.services.survey import CRITERIA, survey_random


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("survey", parents=[parent], help="random-state survey of three two-qubit criteria")
    p.add_argument("--n", type=int, default=100_000, help="number of random states")
    p.add_argument("--criteria", default=",".join(CRITERIA), help=f"comma-separated subset of {', '.join(CRITERIA)}")
    p.add_argument("--batch-size", type=int, default=None, help="states per seeded shard")
    p.set_defaults(handler=run, default_format="csv", config_builder=lambda args: run_config(
        args, {"n": args.n, "criteria": args.criteria, "batch_size": args.batch_size or ""}))


def run(args: argparse.Namespace, config: RunConfig) -> Artifact:
    criteria = [c.strip() for c in args.criteria.split(",") if c.strip()]
    table = survey_random(args.n, config.seed, criteria, args.batch_size, config.threads)
    rows = [[r.category, r.count, r.fraction, r.ci_low, r.ci_high] for r in table.rows]
    header = ["category", "count", "fraction", "ci_low", "ci_high"]
    return Artifact(table, f"# n: {table.n}\n# seed: {table.seed}\n" + csv_rows(header, rows))
