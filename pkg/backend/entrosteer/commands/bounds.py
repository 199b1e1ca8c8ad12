"""`bound`: catalogue entropic uncertainty bounds, optionally certified numerically."""

import argparse

from entrosteer.commands.common import Artifact, csv_rows, entropy_kind, run_config
from entrosteer.errors import ConfigError
from entrosteer.models.schemas import RunConfig
from entrosteer.services import eur_bounds, presets


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("bound", parents=[parent], help="entropic uncertainty bound for m MUBs")
    p.add_argument("--criterion", choices=["shannon", "tsallis", "renyi"], default="shannon")
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--r", type=float, default=None)
    p.add_argument("--d", type=int, default=2, help="dimension of the (first) party")
    p.add_argument("--db", type=int, default=None, help="second party dimension for composite bounds")
    p.add_argument("--m", type=int, default=2, help="number of settings")
    p.add_argument("--scenario", choices=["single", "separable", "any"], default="single")
    p.add_argument("--certify", action="store_true", help="minimise over pure states instead of the catalogue")
    p.add_argument("--meas", default="mub-complete", help="measurement spec used by --certify")
    p.add_argument("--restarts", type=int, default=None)
    p.set_defaults(handler=run, config_builder=lambda args: run_config(
        args, {"d": args.d, "db": args.db or args.d, "m": args.m, "certify": args.certify}))


def run(args: argparse.Namespace, config: RunConfig) -> Artifact:
    kind = entropy_kind(config.entropy)
    d, db, m = args.d, args.db or args.d, args.m

    if args.certify:
        mset = presets.measurement_spec(args.meas, d)
        if m > len(mset):
            raise ConfigError(f"{args.meas!r} has {len(mset)} bases, cannot take {m}")
        mset = mset.select(range(m))
        mset_b = None
        if config.scenario != "single":
            mset_b = presets.measurement_spec(args.meas, db).select(range(m))
        bound = eur_bounds.verify_bound_numeric(mset, kind, config.scenario, seed=config.seed,
                                                mset_b=mset_b, restarts=args.restarts)
    elif config.scenario == "single":
        bound = eur_bounds.bound_single(kind, d, m)
    else:
        bound = eur_bounds.bound_composite(d, db, m, kind, config.scenario)

    header = ["value", "provenance", "tag", "notes"]
    return Artifact(bound, csv_rows(header, [[bound.value, bound.provenance, bound.tag, " | ".join(bound.notes)]]))
