"""`reproduce`: the data behind a figure or table, as documented CSV."""

import argparse

from entrosteer.commands.common import Artifact, run_config
from entrosteer.models.schemas import RunConfig
from entrosteer.services.figures.registry import get_figure_registry, to_csv

FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "oneway", "tripartite-table")


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("reproduce", parents=[parent], help="emit the data behind a figure or table")
    p.add_argument("figure", choices=FIGURES)
    p.set_defaults(handler=run, default_format="csv",
                   config_builder=lambda args: run_config(args, {"figure": args.figure}))


def run(args: argparse.Namespace, config: RunConfig) -> Artifact:
    data = get_figure_registry().render(args.figure, config.resolution, config.threads, config.seed)
    return Artifact(data, to_csv(data))
