"""
Figure registry for `reproduce`. Each entry builds the rows behind one figure or table;
rendering to CSV puts the column documentation in `#` comment lines above the header.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np
from scipy.optimize import brentq

from entrosteer.config import get_settings
from entrosteer.errors import ConfigError, NonMonotone, NoViolation
from entrosteer.models.schemas import FigureColumn, FigureData
from entrosteer.services import eur_bounds, presets
from entrosteer.services.criteria import (
    CriterionConfig,
    Scenario,
    assemblage,
    closed_form_isotropic,
    one_way_window,
    steering_tsallis,
)
from entrosteer.services.entropy import EntropyKind
from entrosteer.services.measurements import bes_measurements, pauli_set
from entrosteer.services.solvers import sweep_parameter, threshold_bisect
from entrosteer.services.states import StateFamily, bes_admissible, bound_entangled, one_way, swap_parties

logger = logging.getLogger(__name__)

Row = dict[str, Optional[Union[float, str]]]


@dataclass
class FigureSpec:
    id: str
    description: str
    columns: list[tuple[str, str]]
    build: Callable[..., list[Row]]


def _grid(lo: float, hi: float, step: float) -> list[float]:
    return [round(float(v), 6) for v in np.arange(lo, hi + step / 2, step)]


def _critical(family: StateFamily, config: CriterionConfig, resolution: float) -> tuple[Optional[float], str]:
    try:
        return threshold_bisect(family, config, resolution).critical, "ok"
    except NoViolation:
        return None, "no_violation"
    except NonMonotone:
        return None, "non_monotone"


# ─── Bounds ───────────────────────────────────────────────────────────────────

def _fig1(**_) -> list[Row]:
    return [dict(row) for row in eur_bounds.composite_bound_curve(_grid(1.0, 5.0, 0.1))]


# ─── Two-qubit and qutrit q/r dependence ──────────────────────────────────────

def _sweep_rows(families: list[tuple[str, dict]], spec: str, variants: list[tuple[str, list[float]]],
                resolution: float, threads: int) -> list[Row]:
    rows: list[Row] = []
    for name, params in families:
        fam = presets.family(name, params)
        _, scenario = presets.scenario_for(spec, fam.dims)
        shannon = CriterionConfig(EntropyKind.shannon(), scenario)
        reference, _ = _critical(fam, shannon, resolution)
        for parameter_name, grid in variants:
            curve = sweep_parameter(fam, shannon, grid, parameter_name, resolution, threads)
            for point in curve.points:
                rows.append({
                    "family": fam.name,
                    "entropy": "tsallis" if parameter_name == "q" else "renyi",
                    "parameter": point.parameter,
                    "critical": point.critical,
                    "shannon_critical": reference,
                    "status": point.status,
                })
    return rows


_SWEEP_COLUMNS = [
    ("family", "state family; the noise parameter is w"),
    ("entropy", "tsallis (parameter q) or renyi (parameter r)"),
    ("parameter", "entropy parameter q or r"),
    ("critical", "smallest w violating the criterion; empty if no violation"),
    ("shannon_critical", "same threshold for the Shannon criterion"),
    ("status", "ok | no_violation | non_monotone | error"),
]

_TWO_QUBIT = [("werner", {}), ("example2", {}), ("example3", {})]


def _fig2(resolution: float, threads: int, **_) -> list[Row]:
    r_grid = [r for r in _grid(0.25, 3.0, 0.25) if r != 1.0]
    q_grid = [q for q in _grid(1.25, 5.0, 0.25)]
    return _sweep_rows(_TWO_QUBIT, "pauli3", [("r", r_grid), ("q", q_grid)], resolution, threads)


def _fig3(resolution: float, threads: int, **_) -> list[Row]:
    return _sweep_rows(_TWO_QUBIT, "pauli3", [("q", _grid(2.0, 3.0, 0.05))], resolution, threads)


def _fig4(resolution: float, threads: int, **_) -> list[Row]:
    families = [("qutrit", {"x": x}) for x in (0.2, 0.5, 1.0)]
    r_grid = [r for r in _grid(0.25, 3.0, 0.25) if r != 1.0]
    q_grid = _grid(1.25, 5.0, 0.25)
    return _sweep_rows(families, "mub-complete", [("r", r_grid), ("q", q_grid)], resolution, threads)


# ─── Isotropic states ─────────────────────────────────────────────────────────

def _fig5(resolution: float, **_) -> list[Row]:
    rows: list[Row] = []
    for d in (2, 3, 5, 7):
        fam = presets.family("isotropic", {"d": d})
        _, scenario = presets.scenario_for("mub-complete", fam.dims)
        critical, _ = _critical(fam, CriterionConfig(EntropyKind.tsallis(2.0), scenario), resolution)
        rows.append({
            "d": d,
            "critical": critical,
            "closed_form": 1 / np.sqrt(d + 1),
            "linear_inequality": (d ** 1.5 - 1) / (d * d - 1),
        })
    return rows


def isotropic_critical_alpha(d: int, m: int, q: float) -> Optional[float]:
    """Root in α of the isotropic closed form against its bound; None if α = 1 is not violated."""
    def margin(alpha: float) -> float:
        return closed_form_isotropic(d, m, q, alpha).margin

    if margin(1.0) >= 0:
        return None
    if margin(0.0) < 0:
        return 0.0
    return float(brentq(margin, 0.0, 1.0, xtol=1e-12))


def _fig6(**_) -> list[Row]:
    rows: list[Row] = []
    for d in (3, 4, 5, 7):
        for q in _grid(1.25, 5.0, 0.25):
            rows.append({"d": d, "q": q, "critical": isotropic_critical_alpha(d, d + 1, q)})
    return rows


# ─── Bound-entangled family ───────────────────────────────────────────────────

BES_GRID = 30


def _fig7(**_) -> list[Row]:
    mset = bes_measurements()
    scenario = Scenario.bipartite(mset, mset, "bes")
    bound = eur_bounds.bound_tsallis_mub(3, 2, 2.0)
    tol = get_settings().violation_tol
    rows: list[Row] = []
    for m1 in np.linspace(0.0, 1.0, BES_GRID):
        for m2 in np.linspace(0.0, 1.0, BES_GRID):
            if not bes_admissible(m1, m2):
                continue
            report = steering_tsallis(assemblage(bound_entangled(m1, m2), scenario), 2.0, bound, tol)
            rows.append({"m1": float(m1), "m2": float(m2), "lhs": report.lhs,
                         "bound": bound.value, "margin": report.margin})
    logger.info(f"bound-entangled grid: {len(rows)} admissible points, "
                f"minimum margin {min(r['margin'] for r in rows):.3e}")
    return rows


# ─── One-way steering ─────────────────────────────────────────────────────────

def _oneway(resolution: float, **_) -> list[Row]:
    rows: list[Row] = []
    for m, axes in ((2, "xz"), (3, "xyz")):
        scenario = Scenario.bipartite(pauli_set(axes), pauli_set(axes), f"pauli-{axes}")
        config = CriterionConfig(EntropyKind.tsallis(2.0), scenario)
        for k in range(1, 9):
            theta = k * np.pi / 36
            window = one_way_window(theta, m)
            forward = StateFamily("one-way", "beta", lambda b, t=theta: one_way(b, t), (2, 2))
            reverse = StateFamily("one-way-reversed", "beta",
                                  lambda b, t=theta: swap_parties(one_way(b, t), (2, 2)), (2, 2))
            rows.append({
                "settings": m,
                "theta": float(theta),
                "window_lower": window.lower,
                "window_upper": window.upper,
                "forward_critical": _critical(forward, config, resolution)[0],
                "reverse_critical": _critical(reverse, config, resolution)[0],
            })
    return rows


# ─── Three qubits ─────────────────────────────────────────────────────────────

# (family, setting, entropy, composite bound family)
TRIPARTITE_ROWS = [
    ("ghz", "a-bc-2", "shannon", "separable"),
    ("ghz", "a-bc-2", "q2", "separable"),
    ("ghz", "ghz-a-bc-3", "shannon", "separable"),
    ("ghz", "ghz-a-bc-3", "shannon", "any"),
    ("ghz", "ghz-a-bc-3", "q2", "separable"),
    ("ghz", "ghz-ab-c-2", "shannon", "-"),
    ("ghz", "ghz-ab-c-2", "q2", "-"),
    ("ghz", "ghz-ab-c-3", "shannon", "-"),
    ("ghz", "ghz-ab-c-3", "q2", "-"),
    ("ghz", "ghz-global-2", "shannon", "-"),
    ("ghz", "ghz-global-2", "q2", "-"),
    ("ghz", "ghz-global-3", "shannon", "-"),
    ("ghz", "ghz-global-3", "q2", "-"),
    ("w", "a-bc-2", "shannon", "separable"),
    ("w", "a-bc-2", "q2", "separable"),
    ("w", "w-a-bc-3", "shannon", "separable"),
    ("w", "w-a-bc-3", "shannon", "any"),
    ("w", "w-a-bc-3", "q2", "separable"),
    ("w", "w-ab-c-2", "shannon", "-"),
    ("w", "w-ab-c-2", "q2", "-"),
    ("w", "w-ab-c-3", "shannon", "-"),
    ("w", "w-ab-c-3", "q2", "-"),
    ("w", "w-global-2", "shannon", "-"),
    ("w", "w-global-2", "q2", "-"),
    ("w", "w-global-3", "shannon", "-"),
    ("w", "w-global-3", "q2", "-"),
]


def tripartite_config(setting: str, entropy: str, composite: str = "separable") -> CriterionConfig:
    criterion, scenario = presets.tripartite_scenario(setting)
    kind = EntropyKind.shannon() if entropy == "shannon" else EntropyKind.tsallis(2.0)
    return CriterionConfig(kind, scenario, criterion, composite=composite if composite != "-" else "separable")


def _tripartite_table(resolution: float, **_) -> list[Row]:
    rows: list[Row] = []
    for name, setting, entropy, composite in TRIPARTITE_ROWS:
        config = tripartite_config(setting, entropy, composite)
        bound = config.resolved_bound()
        critical, status = _critical(presets.family(name), config, resolution)
        rows.append({
            "state": name,
            "setting": setting,
            "entropy": entropy,
            "composite": composite,
            "bound": bound.value,
            "provenance": bound.provenance,
            "critical": critical,
            "status": status,
        })
    return rows


# ─── Registry ─────────────────────────────────────────────────────────────────

class FigureRegistry:
    """Figure datasets by id; `render` builds the rows and wraps them with their column docs."""

    def __init__(self):
        self._figures: dict[str, FigureSpec] = {}
        self._load_figures()

    def _load_figures(self):
        self.register(FigureSpec(
            id="fig1",
            description="Two-qubit Pauli composite Tsallis bounds versus q (nats)",
            columns=[
                ("q", "Tsallis parameter"),
                ("pair", "two settings, ln_q(4)"),
                ("triple_entangled", "three settings, arbitrary states, 3 ln_q(2)"),
                ("triple_separable", "three settings, separable states, 2 ln_q(4)"),
                ("triple", "bound in use: the smaller of the two, switching at q = 2"),
            ],
            build=_fig1,
        ))
        self.register(FigureSpec(
            id="fig2",
            description="Critical w of Werner and the two printed two-qubit states, Pauli triple, Rényi and Tsallis",
            columns=_SWEEP_COLUMNS,
            build=_fig2,
        ))
        self.register(FigureSpec(
            id="fig3",
            description="Critical w for q in [2, 3], Pauli triple",
            columns=_SWEEP_COLUMNS,
            build=_fig3,
        ))
        self.register(FigureSpec(
            id="fig4",
            description="Critical w of noisy two-qutrit states x in {0.2, 0.5, 1}, complete MUBs",
            columns=_SWEEP_COLUMNS,
            build=_fig4,
        ))
        self.register(FigureSpec(
            id="fig5",
            description="Critical alpha of isotropic states, complete MUBs, q = 2",
            columns=[
                ("d", "local dimension"),
                ("critical", "bisected threshold from the measured distributions"),
                ("closed_form", "1/sqrt(d + 1)"),
                ("linear_inequality", "threshold of the linear steering inequality, (d^1.5 - 1)/(d^2 - 1)"),
            ],
            build=_fig5,
        ))
        self.register(FigureSpec(
            id="fig6",
            description="Critical alpha of isotropic states versus q, m = d + 1 settings, closed form",
            columns=[
                ("d", "local dimension"),
                ("q", "Tsallis parameter"),
                ("critical", "root of the closed form against the bound; empty if no violation"),
            ],
            build=_fig6,
        ))
        self.register(FigureSpec(
            id="fig7",
            description="Bound-entangled qutrit family, q = 2, rotated qutrit bases on both sides",
            columns=[
                ("m1", "family parameter"),
                ("m2", "family parameter"),
                ("lhs", "criterion left-hand side"),
                ("bound", "two-MUB qutrit bound at q = 2"),
                ("margin", "lhs - bound; negative would mean violation"),
            ],
            build=_fig7,
        ))
        self.register(FigureSpec(
            id="oneway",
            description="One-way steering windows in beta, q = 2, Pauli settings",
            columns=[
                ("settings", "number of Pauli settings"),
                ("theta", "state angle"),
                ("window_lower", "closed-form A to B threshold"),
                ("window_upper", "closed-form B to A threshold"),
                ("forward_critical", "bisected A to B threshold"),
                ("reverse_critical", "bisected B to A threshold"),
            ],
            build=_oneway,
        ))
        self.register(FigureSpec(
            id="tripartite-table",
            description="Noise thresholds of noisy GHZ and W states for the three-qubit criteria",
            columns=[
                ("state", "ghz (parameter gamma) or w (parameter delta)"),
                ("setting", "named measurement setting"),
                ("entropy", "shannon or q2 (Tsallis q = 2)"),
                ("composite", "bound family for two trusted parties; - when one party is trusted"),
                ("bound", "bound value in nats"),
                ("provenance", "analytic | conjectured | numerical"),
                ("critical", "noise threshold; empty if no violation"),
                ("status", "ok | no_violation | non_monotone"),
            ],
            build=_tripartite_table,
        ))

    def register(self, spec: FigureSpec) -> None:
        self._figures[spec.id] = spec

    @property
    def ids(self) -> list[str]:
        return list(self._figures)

    def render(self, figure_id: str, resolution: Optional[float] = None, threads: int = 1,
               seed: int = 0) -> FigureData:
        spec = self._figures.get(figure_id)
        if not spec:
            raise ConfigError(f"unknown figure {figure_id!r}; choose from {self.ids}")
        resolution = resolution or get_settings().resolution
        logger.info(f"building {figure_id} (resolution {resolution:g}, threads {threads})")
        rows = spec.build(resolution=resolution, threads=threads, seed=seed)
        return FigureData(
            figure=spec.id,
            description=spec.description,
            columns=[FigureColumn(name=n, doc=d) for n, d in spec.columns],
            rows=rows,
            seed=seed,
        )


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def to_csv(data: FigureData) -> str:
    buf = io.StringIO()
    buf.write(f"# figure: {data.figure}\n# {data.description}\n# seed: {data.seed}\n")
    for col in data.columns:
        buf.write(f"# column {col.name}: {col.doc}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([c.name for c in data.columns])
    for row in data.rows:
        writer.writerow([_cell(row[c.name]) for c in data.columns])
    return buf.getvalue()


@lru_cache()
def get_figure_registry() -> FigureRegistry:
    return FigureRegistry()
