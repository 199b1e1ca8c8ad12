"""`check`: evaluate one criterion on one state."""

import argparse

from entrosteer.commands.common import (
    Artifact,
    add_criterion_args,
    add_state_args,
    csv_rows,
    resolve_criterion,
    resolve_state,
    run_config,
)
from entrosteer.models.schemas import CriterionReport, RunConfig

REPORT_COLUMNS = ["criterion", "parameter", "lhs", "bound", "provenance", "violated", "margin", "rests_on_conjecture"]


def report_row(report: CriterionReport) -> list:
    return [report.criterion, report.parameter, report.lhs, report.bound.value, report.bound.provenance,
            report.violated, report.margin, report.rests_on_conjecture]


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("check", parents=[parent], help="evaluate a criterion on a state")
    add_state_args(p)
    p.add_argument("--dims", default=None, help="party dimensions for --state, e.g. 2,2")
    add_criterion_args(p)
    p.set_defaults(handler=run, config_builder=run_config)


def run(args: argparse.Namespace, config: RunConfig) -> Artifact:
    rho, dims = resolve_state(args, config)
    report = resolve_criterion(config, dims).evaluate(rho)
    return Artifact(report, csv_rows(REPORT_COLUMNS, [report_row(report)]))
