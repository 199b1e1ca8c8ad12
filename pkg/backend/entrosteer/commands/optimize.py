"""`optimize`: local-unitary search over measurement settings for one state."""

import argparse

from entrosteer.commands.check import REPORT_COLUMNS, report_row
from entrosteer.commands.common import (
    Artifact,
    add_criterion_args,
    add_state_args,
    csv_rows,
    resolve_criterion,
    resolve_state,
    run_config,
)
from entrosteer.models.schemas import RunConfig
from entrosteer.services.solvers import optimize_measurements


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("optimize", parents=[parent], help="optimise measurement settings by local unitaries")
    add_state_args(p)
    p.add_argument("--dims", default=None, help="party dimensions for --state, e.g. 2,2")
    add_criterion_args(p)
    p.add_argument("--restarts", type=int, default=None, help="multi-start count (restart 0 keeps the given settings)")
    p.add_argument("--maxiter", type=int, default=None)
    p.set_defaults(handler=run, config_builder=lambda args: run_config(
        args, {"restarts": args.restarts or "", "maxiter": args.maxiter or ""}))


def run(args: argparse.Namespace, config: RunConfig) -> Artifact:
    rho, dims = resolve_state(args, config)
    criterion = resolve_criterion(config, dims)
    result = optimize_measurements(rho, criterion, args.restarts, config.seed, args.maxiter)
    rows = [[*report_row(result.report), result.start_lhs]]
    return Artifact(result, csv_rows([*REPORT_COLUMNS, "start_lhs"], rows))
