"""Shared CLI plumbing: common flags, RunConfig assembly, state and criterion resolution."""

import argparse
import csv
import io
from dataclasses import dataclass
from typing import Callable, Optional

from pydantic import BaseModel, ValidationError

from entrosteer.config import get_settings
from entrosteer.errors import ConfigError, OutOfRange
from entrosteer.models.schemas import EntropySpec, FamilySpec, RunConfig
from entrosteer.services import presets
from entrosteer.services.criteria import CriterionConfig
from entrosteer.services.entropy import EntropyKind
from entrosteer.services.quantum_core import DensityMatrix, load_density
from entrosteer.services.states import StateFamily

# flags that fix a family's shape, and flags that give the value of its noise parameter
SHAPE_FLAGS = ("d", "x", "theta", "m2")
VALUE_FLAGS = ("w", "alpha", "beta", "gamma", "delta", "m1")
CRITERIA = ("shannon", "tsallis", "renyi", "guhne", "linear", "two-qubit-q2", "a-to-bc", "ab-to-c")


@dataclass
class Artifact:
    """What a command hands back to main: the model for JSON, and its CSV form if it has one."""
    model: BaseModel
    csv: Optional[str] = None


Handler = Callable[[argparse.Namespace, RunConfig], Artifact]


def common_parser() -> argparse.ArgumentParser:
    """Flags every subcommand accepts; used as a parent parser."""
    settings = get_settings()
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run options")
    g.add_argument("--seed", type=int, default=settings.seed, help="base seed (env ENTROSTEER_SEED)")
    g.add_argument("--threads", type=int, default=settings.threads, help="worker cap for sweeps and surveys")
    g.add_argument("--resolution", type=float, default=settings.resolution, help="bisection resolution")
    g.add_argument("--format", choices=["csv", "json"], default=None, help="output format")
    g.add_argument("--out", default=None, help="write the artifact to this path instead of stdout")
    g.add_argument("--record", action="store_true", help="store the run in the run ledger")
    g.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    return p


def add_state_args(p: argparse.ArgumentParser, value_flags: bool = True) -> None:
    g = p.add_argument_group("state")
    g.add_argument("--family", choices=sorted(presets.FAMILIES), help="state family")
    for flag in SHAPE_FLAGS:
        g.add_argument(f"--{flag}", type=float, default=None, help=f"family shape parameter {flag}")
    g.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="extra family parameter, e.g. c1=-0.8 for --family bloch (repeatable)")
    if value_flags:
        for flag in VALUE_FLAGS:
            g.add_argument(f"--{flag}", type=float, default=None, help=f"noise parameter {flag}")
        g.add_argument("--state", default=None, help="density matrix JSON file instead of a family")


def add_criterion_args(p: argparse.ArgumentParser, default: str = "tsallis") -> None:
    g = p.add_argument_group("criterion")
    g.add_argument("--criterion", choices=CRITERIA, default=default)
    g.add_argument("--q", type=float, default=None, help="Tsallis parameter")
    g.add_argument("--r", type=float, default=None, help="Rényi parameter")
    g.add_argument("--meas", default=None,
                   help=f"measurement spec: {', '.join(presets.MEASUREMENT_SPECS)} or a three-qubit setting "
                        f"({', '.join(sorted(presets.TRIPARTITE))})")
    g.add_argument("--settings", type=int, default=None, help="use the first N bases of --meas")
    g.add_argument("--composite", choices=["separable", "any"], default="separable",
                   help="bound family when two parties are trusted")


# ─── RunConfig ────────────────────────────────────────────────────────────────

def family_params(args: argparse.Namespace) -> dict[str, float]:
    params = {k: getattr(args, k) for k in SHAPE_FLAGS if getattr(args, k, None) is not None}
    for item in getattr(args, "param", []) or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--param expects KEY=VALUE, got {item!r}")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"--param {key}: {value!r} is not a number")
    return params


def entropy_spec(args: argparse.Namespace) -> EntropySpec:
    criterion = getattr(args, "criterion", None) or "shannon"
    q, r = getattr(args, "q", None), getattr(args, "r", None)
    if criterion in ("tsallis", "renyi", "shannon"):
        kind = criterion
    elif criterion in ("linear", "two-qubit-q2"):
        kind, q = "tsallis", 2.0
    else:
        kind = "tsallis" if q is not None else "shannon"
    return EntropySpec(kind=kind, q=q, r=r)


def run_config(args: argparse.Namespace, options: Optional[dict[str, str]] = None) -> RunConfig:
    """Validate everything the command will use before any computation starts."""
    options = dict(options or {})
    if getattr(args, "composite", None):
        options.setdefault("composite", args.composite)
    try:
        family = FamilySpec(name=args.family, params=family_params(args)) if getattr(args, "family", None) else None
        return RunConfig(
            subcommand=args.command,
            family=family,
            measurements=getattr(args, "meas", None),
            num_settings=getattr(args, "settings", None),
            criterion=getattr(args, "criterion", None),
            entropy=entropy_spec(args) if hasattr(args, "criterion") else EntropySpec(),
            scenario=getattr(args, "scenario", "single"),
            seed=args.seed,
            out=args.out,
            format=args.format or getattr(args, "default_format", "json"),
            resolution=args.resolution,
            threads=args.threads,
            options={k: str(v) for k, v in options.items()},
        )
    except ValidationError as e:
        raise ConfigError("; ".join(err["msg"] for err in e.errors()))


# ─── Resolution ───────────────────────────────────────────────────────────────

def entropy_kind(spec: EntropySpec) -> EntropyKind:
    if spec.kind == "tsallis":
        return EntropyKind.tsallis(spec.q)
    if spec.kind == "renyi":
        return EntropyKind.renyi(spec.r)
    return EntropyKind.shannon()


def resolve_family(config: RunConfig) -> StateFamily:
    if config.family is None:
        raise ConfigError(f"{config.subcommand} needs --family")
    try:
        return presets.family(config.family.name, config.family.params)
    except OutOfRange as e:
        raise ConfigError(str(e))


def default_measurements(dims: tuple[int, ...]) -> str:
    if len(dims) == 3:
        raise ConfigError("three-qubit families need --meas with a named setting")
    return "pauli3" if dims == (2, 2) else "mub-complete"


def resolve_criterion(config: RunConfig, dims: tuple[int, ...]) -> CriterionConfig:
    spec = config.measurements or default_measurements(dims)
    criterion, scenario = presets.scenario_for(spec, dims, config.num_settings)
    name = config.criterion if config.criterion in ("guhne", "linear", "two-qubit-q2") else criterion
    if name in ("linear", "two-qubit-q2") and dims != (2, 2):
        raise ConfigError(f"--criterion {name} is defined for two qubits only")
    return CriterionConfig(entropy_kind(config.entropy), scenario, name,
                           composite=config.options.get("composite", "separable"),
                           tolerance=get_settings().violation_tol)


def resolve_state(args: argparse.Namespace, config: RunConfig) -> tuple[DensityMatrix, tuple[int, ...]]:
    """A state from --state FILE (with --dims) or from --family plus its noise-parameter flag."""
    if getattr(args, "state", None):
        dims = tuple(int(d) for d in (getattr(args, "dims", None) or "").split(",") if d)
        if not dims:
            raise ConfigError("--state needs --dims, e.g. --dims 2,2")
        return load_density(args.state), dims
    family = resolve_family(config)
    values = [getattr(args, k) for k in VALUE_FLAGS if getattr(args, k, None) is not None]
    if len(values) != 1:
        raise ConfigError(f"give exactly one value for the family parameter --{family.parameter_name}")
    try:
        return family(values[0]), family.dims
    except OutOfRange as e:
        raise ConfigError(str(e))


def csv_rows(header: list[str], rows: list[list]) -> str:
    def cell(v) -> str:
        if v is None:
            return ""
        if isinstance(v, float):
            return f"{v:.10g}"
        return str(v)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([cell(v) for v in row] for row in rows)
    return buf.getvalue()
