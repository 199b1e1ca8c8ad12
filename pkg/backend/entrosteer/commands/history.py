"""`history`: list or show runs stored in the run ledger."""

import argparse
import json

from entrosteer.commands.common import Artifact, csv_rows, run_config
from entrosteer.database import get_run_artifact, list_runs
from entrosteer.errors import ConfigError
from entrosteer.models.schemas import RunConfig, RunHistory, RunSummary


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("history", parents=[parent], help="recorded runs (see --record)")
    p.add_argument("--subcommand", default=None, help="only runs of this subcommand")
    p.add_argument("--limit", type=int, default=20)
    p.add_argument("--show", type=int, default=None, metavar="ID", help="print the stored artifact of one run")
    p.set_defaults(handler=run, config_builder=run_config, skip_record=True)


def run(args: argparse.Namespace, config: RunConfig) -> Artifact:
    if args.show is not None:
        artifact = get_run_artifact(args.show)
        if artifact is None:
            raise ConfigError(f"no recorded run with id {args.show}")
        return Artifact(RunHistory(runs=[], artifact=artifact), artifact)

    runs = [
        RunSummary(config=json.loads(r["config_json"]), **{k: v for k, v in r.items() if k != "config_json"})
        for r in list_runs(args.subcommand, args.limit)
    ]
    rows = [[r.id, r.subcommand, r.format, r.seed, r.exit_code, r.created_at] for r in runs]
    return Artifact(RunHistory(runs=runs),
                    csv_rows(["id", "subcommand", "format", "seed", "exit_code", "created_at"], rows))
