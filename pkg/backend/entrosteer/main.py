"""Command-line entry point."""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from entrosteer.commands import bounds, check, entropy, history, optimize, reproduce, survey, sweep, threshold
from entrosteer.commands.common import Artifact, common_parser
from entrosteer.config import get_settings
from entrosteer.database import record_run
from entrosteer.errors import ConfigError, EntrosteerError

logger = logging.getLogger("entrosteer")

EXIT_OK, EXIT_COMPUTATION, EXIT_CONFIG = 0, 1, 2

COMMANDS = (entropy, bounds, check, threshold, sweep, optimize, survey, reproduce, history)


# ─── Parser ───────────────────────────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entrosteer",
        description="Entropic steering criteria: bounds, checks, noise thresholds and figure data.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    parent = common_parser()
    for module in COMMANDS:
        module.register(subparsers, parent)
    return parser


def setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="[%(module)s] %(message)s",
        stream=sys.stderr,
        force=True,
    )


def render(artifact: Artifact, fmt: str) -> str:
    if fmt == "csv":
        if artifact.csv is None:
            raise ConfigError("this command has no CSV output; use --format json")
        return artifact.csv
    return artifact.model.model_dump_json(indent=2) + "\n"


# ─── Run ──────────────────────────────────────────────────────────────────────

def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG

    setup_logging(args.verbose)
    settings = get_settings()
    try:
        config = args.config_builder(args)
        artifact = args.handler(args, config)
        text = render(artifact, config.format)
    except (ConfigError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except EntrosteerError as e:
        print(f"error: {e}", file=sys.stderr)
        logger.debug(f"details: {e.details}")
        return EXIT_COMPUTATION

    if config.out:
        Path(config.out).parent.mkdir(parents=True, exist_ok=True)
        Path(config.out).write_text(text, encoding="utf-8")
        logger.info(f"wrote {config.out}")
    else:
        sys.stdout.write(text)

    if (args.record or settings.record_runs) and not getattr(args, "skip_record", False):
        run_id = record_run(config.subcommand, config.model_dump(), text, config.format, config.seed)
        logger.info(f"recorded as run {run_id}")
    return EXIT_OK


def main() -> None:
    sys.exit(run())
