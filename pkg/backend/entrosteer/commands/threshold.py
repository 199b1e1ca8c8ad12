"""`threshold`: critical noise parameter of a family for one criterion."""

import argparse

from entrosteer.commands.common import (
    Artifact,
    add_criterion_args,
    add_state_args,
    csv_rows,
    resolve_criterion,
    resolve_family,
    run_config,
)
from entrosteer.models.schemas import RunConfig
from entrosteer.services.solvers import threshold_bisect


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("threshold", parents=[parent], help="bisect the noise threshold of a family")
    add_state_args(p, value_flags=False)
    add_criterion_args(p)
    p.set_defaults(handler=run, config_builder=run_config)


def run(args: argparse.Namespace, config: RunConfig) -> Artifact:
    family = resolve_family(config)
    result = threshold_bisect(family, resolve_criterion(config, family.dims), config.resolution)
    header = ["family", "criterion", "parameter", "critical", "bracket_lo", "bracket_hi", "evaluations",
              "bound", "provenance"]
    bound = result.bound
    row = [result.family, result.criterion, family.parameter_name, result.critical, *result.bracket,
           result.evaluations, bound.value if bound else None, bound.provenance if bound else None]
    return Artifact(result, csv_rows(header, [row]))
