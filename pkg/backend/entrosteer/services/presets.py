"""
Named state families, measurement specs and scenarios, so the CLI and the figure
datasets can address everything by a short string.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Callable, Mapping, Optional

import numpy as np

from entrosteer.errors import ConfigError
from entrosteer.services import states
from entrosteer.services.criteria import Scenario
from entrosteer.services.measurements import (
    MeasurementSet,
    bes_measurements,
    conjugate,
    load_measurement_set,
    mub_complete,
    mub_dim4,
    mub_fourier_pair,
    pauli_set,
)
from entrosteer.services.states import StateFamily

logger = logging.getLogger(__name__)


# ─── State families ───────────────────────────────────────────────────────────

def _int_param(params: Mapping[str, float], key: str, default: int) -> int:
    value = params.get(key, default)
    if float(value) != int(value):
        raise ConfigError(f"--{key} must be an integer, got {value}")
    return int(value)


def _werner(params: Mapping[str, float]) -> StateFamily:
    return StateFamily("werner", "w", states.werner, (2, 2))


def _isotropic(params: Mapping[str, float]) -> StateFamily:
    d = _int_param(params, "d", 2)
    return StateFamily(f"isotropic-d{d}", "alpha", lambda a: states.isotropic(d, a), (d, d), fixed={"d": d})


def _bloch(params: Mapping[str, float]) -> StateFamily:
    p = states.BlochParams.of(
        [params.get(f"a{i}", 0.0) for i in (1, 2, 3)],
        [params.get(f"b{i}", 0.0) for i in (1, 2, 3)],
        [params.get(f"c{i}", 0.0) for i in (1, 2, 3)],
    )
    base = states.two_qubit_bloch(p)
    return StateFamily("bloch", "w", lambda w: states.noisy_family(base, w), (2, 2), fixed=dict(params))


def _example(index: int) -> Callable[[Mapping[str, float]], StateFamily]:
    def build(params: Mapping[str, float]) -> StateFamily:
        base = states.example_states()[index]
        return StateFamily(f"example{index + 2}", "w", lambda w: states.noisy_family(base, w), (2, 2))
    return build


def _qutrit(params: Mapping[str, float]) -> StateFamily:
    x = float(params.get("x", 1.0))
    base = states.two_qutrit(x)
    return StateFamily(f"qutrit-x{x:g}", "w", lambda w: states.noisy_family(base, w), (3, 3), fixed={"x": x})


def _one_way(params: Mapping[str, float]) -> StateFamily:
    theta = float(params.get("theta", np.pi / 8))
    return StateFamily("one-way", "beta", lambda b: states.one_way(b, theta), (2, 2), fixed={"theta": theta})


def bes_m1_limit(m2: float) -> float:
    """Largest m1 with m1² + m1·m2 + m2² ≤ 1."""
    return float((-m2 + np.sqrt(max(4 - 3 * m2 * m2, 0.0))) / 2)


def _bes(params: Mapping[str, float]) -> StateFamily:
    m2 = float(params.get("m2", 0.0))
    if not 0 <= m2 <= 1:
        raise ConfigError(f"--m2 must lie in [0, 1], got {m2}")
    return StateFamily("bound-entangled", "m1", lambda m1: states.bound_entangled(m1, m2), (3, 3),
                       hi=bes_m1_limit(m2), fixed={"m2": m2})


def _ghz(params: Mapping[str, float]) -> StateFamily:
    return StateFamily("ghz", "gamma", states.noisy_ghz, (2, 2, 2))


def _w(params: Mapping[str, float]) -> StateFamily:
    return StateFamily("w", "delta", states.noisy_w, (2, 2, 2))


FAMILIES: dict[str, Callable[[Mapping[str, float]], StateFamily]] = {
    "werner": _werner,
    "isotropic": _isotropic,
    "bloch": _bloch,
    "example2": _example(0),
    "example3": _example(1),
    "qutrit": _qutrit,
    "one_way": _one_way,
    "bes": _bes,
    "ghz": _ghz,
    "w": _w,
}


def family(name: str, params: Optional[Mapping[str, float]] = None) -> StateFamily:
    builder = FAMILIES.get(name)
    if builder is None:
        raise ConfigError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}")
    return builder(params or {})


# ─── Measurement specs ────────────────────────────────────────────────────────

MEASUREMENT_SPECS = ("pauli2", "pauli3", "pauli:<axes>", "mub-complete", "mub-fourier", "mub-dim4", "bes",
                     "<file>.json")


def measurement_spec(spec: str, dim: int) -> MeasurementSet:
    """Resolve a named measurement set for one party of dimension `dim`."""
    if spec in ("pauli2", "pauli3") or spec.startswith("pauli:"):
        axes = {"pauli2": "xz", "pauli3": "xyz"}.get(spec) or spec.split(":", 1)[1]
        mset = pauli_set(axes)
    elif spec == "mub-complete":
        mset = mub_complete(dim)
    elif spec == "mub-fourier":
        mset = mub_fourier_pair(dim)
    elif spec == "mub-dim4":
        mset = mub_dim4()
    elif spec == "bes":
        mset = bes_measurements()
    elif spec.endswith(".json"):
        if not Path(spec).is_file():
            raise ConfigError(f"measurement file not found: {spec}")
        mset = load_measurement_set(spec)
    else:
        raise ConfigError(f"unknown measurement spec {spec!r}; choose from {list(MEASUREMENT_SPECS)}")
    if mset.dim != dim:
        raise ConfigError(f"measurements {spec!r} act on C^{mset.dim}, party has dimension {dim}")
    return mset


def bipartite_scenario(spec: str, dims: tuple[int, ...], num_settings: Optional[int] = None) -> Scenario:
    """
    Bob measures the named set, Alice its complex conjugate so that maximally entangled
    states give perfect correlations. The bound-entangled bases are used as given on both sides.
    """
    if len(dims) != 2:
        raise ConfigError(f"bipartite measurement specs need a two-party family, got dims {dims}")
    bob = measurement_spec(spec, dims[1])
    if num_settings is not None:
        if not 1 <= num_settings <= len(bob):
            raise ConfigError(f"--settings {num_settings} outside 1..{len(bob)} for {spec!r}")
        bob = bob.select(range(num_settings))
    alice = bob if spec == "bes" else conjugate(bob)
    if dims[0] != dims[1]:
        alice = measurement_spec(spec, dims[0]).select(range(len(bob)))
    return Scenario.bipartite(alice, bob, name=spec)


# ─── Three-qubit scenarios ────────────────────────────────────────────────────

def _local(a: str, b: str, c: str, trusted: tuple[int, ...], name: str) -> Scenario:
    return Scenario.tripartite(pauli_set(a), pauli_set(b), pauli_set(c), trusted, name)


def _global(ab: tuple[int, ...], c: str, name: str) -> Scenario:
    return Scenario((mub_dim4().select(ab), pauli_set(c)), (1,), name)


# criterion name, builder; party order (A, B, C), settings listed per party
TRIPARTITE: dict[str, tuple[str, Callable[[], Scenario]]] = {
    "a-bc-2": ("a-to-bc", lambda: _local("xz", "xz", "xz", (1, 2), "a-bc-2")),
    "ghz-a-bc-3": ("a-to-bc", lambda: _local("xxz", "xyz", "xyz", (1, 2), "ghz-a-bc-3")),
    "w-a-bc-3": ("a-to-bc", lambda: _local("xyz", "xyz", "xyz", (1, 2), "w-a-bc-3")),
    "ghz-ab-c-2": ("ab-to-c", lambda: _local("xz", "xz", "xz", (2,), "ghz-ab-c-2")),
    "ghz-ab-c-3": ("ab-to-c", lambda: _local("xxz", "xyz", "xyz", (2,), "ghz-ab-c-3")),
    "w-ab-c-2": ("ab-to-c", lambda: _local("xz", "zz", "xz", (2,), "w-ab-c-2")),
    "w-ab-c-3": ("ab-to-c", lambda: _local("xyz", "zzz", "xyz", (2,), "w-ab-c-3")),
    "ghz-global-2": ("ab-to-c", lambda: _global((0, 1), "zx", "ghz-global-2")),
    "ghz-global-3": ("ab-to-c", lambda: _global((0, 1, 2), "zxy", "ghz-global-3")),
    "w-global-2": ("ab-to-c", lambda: _global((0, 1), "zx", "w-global-2")),
    "w-global-3": ("ab-to-c", lambda: _global((0, 1, 3), "zxy", "w-global-3")),
}


def tripartite_scenario(name: str) -> tuple[str, Scenario]:
    """(criterion name, scenario) for a named three-qubit setting."""
    entry = TRIPARTITE.get(name)
    if entry is None:
        raise ConfigError(f"unknown three-qubit setting {name!r}; choose from {sorted(TRIPARTITE)}")
    criterion, build = entry
    return criterion, build()


def scenario_for(spec: str, dims: tuple[int, ...], num_settings: Optional[int] = None) -> tuple[str, Scenario]:
    """Named three-qubit settings for three-party families, measurement specs otherwise."""
    if len(dims) == 3 or spec in TRIPARTITE:
        criterion, scenario = tripartite_scenario(spec)
        if num_settings is not None and num_settings != scenario.num_settings:
            raise ConfigError(f"setting {spec!r} has {scenario.num_settings} settings, not {num_settings}")
        return criterion, scenario
    return "entropic", bipartite_scenario(spec, dims, num_settings)
