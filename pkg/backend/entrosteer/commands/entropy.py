"""`entropy`: entropies of a distribution given on the command line."""

import argparse

from entrosteer.commands.common import Artifact, csv_rows, run_config
from entrosteer.errors import ConfigError
from entrosteer.models.schemas import EntropyReport, RunConfig
from entrosteer.services.entropy import EntropyKind, ProbDist, entropy, min_entropy, relative_entropy


def _floats(text: str, flag: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{flag} expects comma-separated numbers, got {text!r}")


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("entropy", parents=[parent], help="Shannon / Tsallis / Rényi entropies of a distribution")
    p.add_argument("--probs", required=True, help="comma-separated probabilities")
    p.add_argument("--q", type=float, action="append", default=[], help="Tsallis parameter (repeatable)")
    p.add_argument("--r", type=float, action="append", default=[], help="Rényi parameter (repeatable)")
    p.add_argument("--reference", default=None, help="second distribution for relative entropies")
    p.set_defaults(handler=run, config_builder=lambda args: run_config(args, {"probs": args.probs}))


def run(args: argparse.Namespace, config: RunConfig) -> Artifact:
    p = ProbDist.of(_floats(args.probs, "--probs"))
    kinds = [EntropyKind.shannon()]
    kinds += [EntropyKind.tsallis(q) for q in args.q]
    kinds += [EntropyKind.renyi(r) for r in args.r]

    values = {k.label: entropy(p, k) for k in kinds}
    values["min"] = min_entropy(p)
    if args.reference:
        ref = ProbDist.of(_floats(args.reference, "--reference"))
        for k in kinds:
            values[f"relative:{k.label}"] = relative_entropy(p, ref, k)

    report = EntropyReport(probs=p.flat.tolist(), values=values)
    return Artifact(report, csv_rows(["quantity", "value"], [[k, v] for k, v in values.items()]))
