"""`sweep`: noise thresholds over a grid of Tsallis q or Rényi r."""

import argparse

import numpy as np

from entrosteer.commands.common import (
    Artifact,
    add_criterion_args,
    add_state_args,
    csv_rows,
    resolve_criterion,
    resolve_family,
    run_config,
)
from entrosteer.errors import ConfigError
from entrosteer.models.schemas import RunConfig
from entrosteer.services.solvers import sweep_parameter


def parse_grid(text: str) -> list[float]:
    """'1.1,1.5,2' or 'start:stop:step' (stop inclusive)."""
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            if step <= 0:
                raise ConfigError("grid step must be positive")
            return [round(float(v), 10) for v in np.arange(start, stop + step / 2, step)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--grid expects 'a,b,c' or 'start:stop:step', got {text!r}")


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("sweep", parents=[parent], help="thresholds over a q or r grid")
    add_state_args(p, value_flags=False)
    add_criterion_args(p, default="shannon")
    p.add_argument("--over", choices=["q", "r"], default="q", help="swept entropy parameter")
    p.add_argument("--grid", required=True, help="'a,b,c' or 'start:stop:step'")
    p.set_defaults(handler=run, config_builder=lambda args: run_config(args, {"over": args.over, "grid": args.grid}),
                   default_format="csv")


def run(args: argparse.Namespace, config: RunConfig) -> Artifact:
    grid = parse_grid(args.grid)
    if not grid or any(v <= 0 for v in grid):
        raise ConfigError("sweep grid values must be positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("sweep grid must be strictly increasing")
    family = resolve_family(config)
    criterion = resolve_criterion(config, family.dims)
    curve = sweep_parameter(family, criterion, grid, args.over, config.resolution, config.threads)
    rows = [[curve.family, curve.criterion, p.parameter, p.critical, p.status] for p in curve.points]
    return Artifact(curve, csv_rows(["family", "criterion", args.over, "critical", "status"], rows))
