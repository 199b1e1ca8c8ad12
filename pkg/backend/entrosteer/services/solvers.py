"""
Noise-threshold bisection, parameter sweeps over q or r, and local-unitary optimisation
of measurement settings.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Literal, Optional, Sequence

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from entrosteer.config import get_settings
from entrosteer.errors import EntrosteerError, NonMonotone, NoViolation
from entrosteer.models.schemas import OptimizationResult, SweepCurve, SweepPoint, ThresholdResult
from entrosteer.services.criteria import CriterionConfig, Scenario
from entrosteer.services.entropy import EntropyKind
from entrosteer.services.measurements import rotate
from entrosteer.services.quantum_core import (
    DensityMatrix,
    bronzan_unitary,
    dagger,
    kron_all,
    make_rng,
    random_bronzan_parameters,
    random_unitary,
    validate_density,
)
from entrosteer.services.states import StateFamily

logger = logging.getLogger(__name__)

PRESCAN_POINTS = 11


# ─── Threshold bisection ──────────────────────────────────────────────────────

def threshold_bisect(family: StateFamily, config: CriterionConfig,
                     resolution: Optional[float] = None) -> ThresholdResult:
    """
    Smallest family parameter at which the criterion is violated, to within `resolution`.

    An 11-point pre-scan checks that the verdict switches from "not violated" to
    "violated" at most once; otherwise NonMonotone. NoViolation if the top of the
    range is not violated.
    """
    resolution = resolution or get_settings().resolution
    config = replace(config, bound=config.resolved_bound())
    evaluations = 0

    def violated(t: float) -> bool:
        nonlocal evaluations
        evaluations += 1
        return config.evaluate(family(t)).violated

    grid = np.linspace(family.lo, family.hi, PRESCAN_POINTS)
    verdicts = [violated(t) for t in grid]
    logger.debug(f"{family.name} prescan: {''.join('V' if v else '.' for v in verdicts)}")

    if not verdicts[-1]:
        raise NoViolation(f"{family.name}: criterion not violated even at {family.parameter_name}={family.hi:g}")
    first = verdicts.index(True)
    if not all(verdicts[first:]):
        raise NonMonotone(f"{family.name}: verdict is not monotone in {family.parameter_name}", verdicts=verdicts)

    if first == 0:
        lo = hi = float(grid[0])
    else:
        lo, hi = float(grid[first - 1]), float(grid[first])
        while hi - lo > resolution:
            mid = 0.5 * (lo + hi)
            if violated(mid):
                hi = mid
            else:
                lo = mid

    critical = 0.5 * (lo + hi)
    logger.info(f"{family.name} [{config.kind.label}]: critical {family.parameter_name} = {critical:.6f} "
                f"after {evaluations} evaluations")
    return ThresholdResult(
        family=family.name,
        criterion=config.kind.label if config.criterion == "entropic" else config.criterion,
        critical=critical,
        resolution=resolution,
        bracket=(lo, hi),
        evaluations=evaluations,
        bound=config.bound,
    )


# ─── Sweeps ───────────────────────────────────────────────────────────────────

def sweep_parameter(family: StateFamily, config: CriterionConfig, grid: Sequence[float],
                    parameter_name: Literal["q", "r"] = "q", resolution: Optional[float] = None,
                    threads: int = 1) -> SweepCurve:
    """
    One threshold per grid value of q (Tsallis) or r (Rényi). Failures are recorded on
    the point and never abort the sweep; output order follows the grid for any thread count.
    """
    variant = "tsallis" if parameter_name == "q" else "renyi"

    def one(value: float) -> SweepPoint:
        kind = EntropyKind(variant, float(value))
        point_config = replace(config, kind=kind, bound=None)
        try:
            result = threshold_bisect(family, point_config, resolution)
        except NoViolation as e:
            return SweepPoint(parameter=value, status="no_violation", message=str(e))
        except NonMonotone as e:
            return SweepPoint(parameter=value, status="non_monotone", message=str(e))
        except EntrosteerError as e:
            logger.warning(f"{parameter_name}={value:g}: {e}")
            return SweepPoint(parameter=value, status="error", message=str(e))
        return SweepPoint(parameter=value, critical=result.critical)

    values = [float(v) for v in grid]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = list(pool.map(one, values))
    else:
        points = [one(v) for v in values]
    return SweepCurve(family=family.name, criterion=config.criterion if config.criterion != "entropic" else variant,
                      parameter_name=parameter_name, points=points)


# ─── Local-unitary optimisation ───────────────────────────────────────────────

def _rz(a: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * a), np.exp(0.5j * a)])


def _ry(b: float) -> np.ndarray:
    c, s = np.cos(b / 2), np.sin(b / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def _hermitian(x: np.ndarray, d: int) -> np.ndarray:
    """d² reals → Hermitian matrix (diagonal, then real and imaginary upper parts)."""
    h = np.diag(x[:d]).astype(np.complex128)
    iu = np.triu_indices(d, 1)
    k = len(iu[0])
    h[iu] = x[d:d + k] + 1j * x[d + k:d + 2 * k]
    return h + np.conj(np.triu(h, 1)).T


class _PartyRotation:
    """Parametrised unitary for one party: Euler angles (d=2), Bronzan (d=3), U0·exp(iH) otherwise."""

    def __init__(self, d: int, rng: Optional[np.random.Generator]):
        self.d = d
        self.base = np.eye(d, dtype=np.complex128)
        if d == 2:
            self.size = 3
            self.x0 = np.zeros(3) if rng is None else rng.uniform(0, 2 * np.pi, 3)
        elif d == 3:
            self.size = 8
            if rng is None:
                self.x0 = np.zeros(8)
            else:
                angles, phases = random_bronzan_parameters(rng)
                self.x0 = np.concatenate([angles, phases])
        else:
            self.size = d * d
            self.x0 = np.zeros(self.size)
            if rng is not None:
                self.base = random_unitary(d, rng)

    def unitary(self, x: np.ndarray) -> np.ndarray:
        if self.d == 2:
            return _rz(x[0]) @ _ry(x[1]) @ _rz(x[2])
        if self.d == 3:
            return bronzan_unitary(x[:3], x[3:])
        return self.base @ expm(1j * _hermitian(x, self.d))


def optimize_measurements(rho: DensityMatrix, config: CriterionConfig, restarts: Optional[int] = None,
                          seed: int = 0, maxiter: Optional[int] = None) -> OptimizationResult:
    """
    Minimise the criterion's lhs over one shared unitary per party applied to that
    party's measurement set. Restart 0 starts from the unrotated settings; the others
    from seeded random rotations. Heuristic: no optimality claim.
    """
    settings = get_settings()
    restarts = restarts or settings.optimizer_restarts
    maxiter = maxiter or settings.optimizer_maxiter
    config = replace(config, bound=config.resolved_bound())
    dims = config.scenario.dims
    evaluations = 0

    def lhs_for(rotations: list[_PartyRotation], x: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        u = kron_all(_split(rotations, x))
        # rotating every basis by U is the same as measuring U†ρU in the original bases
        rotated = validate_density(dagger(u) @ rho.matrix @ u)
        return config.evaluate(rotated).lhs

    start_lhs = config.evaluate(rho).lhs
    best_lhs, best_unitaries = start_lhs, [np.eye(d, dtype=np.complex128) for d in dims]
    for idx in range(restarts):
        rng = None if idx == 0 else make_rng(seed, idx)
        rotations = [_PartyRotation(d, rng) for d in dims]
        x0 = np.concatenate([r.x0 for r in rotations])
        res = minimize(lambda x: lhs_for(rotations, x), x0, method="Nelder-Mead",
                       options={"maxiter": maxiter, "xatol": 1e-8, "fatol": 1e-12, "adaptive": True})
        logger.debug(f"restart {idx}: lhs {res.fun:.8f}")
        if res.fun < best_lhs:
            best_lhs, best_unitaries = float(res.fun), _split(rotations, res.x)

    scenario = Scenario(
        tuple(rotate(party, u) for party, u in zip(config.scenario.parties, best_unitaries)),
        config.scenario.trusted,
        f"{config.scenario.name}-optimised",
    )
    report = config.with_scenario(scenario).evaluate(rho)
    logger.info(f"optimised lhs {report.lhs:.8f} (start {start_lhs:.8f}, bound {report.bound.value:.8f})")
    return OptimizationResult(
        report=report,
        start_lhs=start_lhs,
        restarts=restarts,
        evaluations=evaluations,
        unitaries_re=[np.real(u).tolist() for u in best_unitaries],
        unitaries_im=[np.imag(u).tolist() for u in best_unitaries],
    )


def _split(rotations: list[_PartyRotation], x: np.ndarray) -> list[np.ndarray]:
    out, k = [], 0
    for r in rotations:
        out.append(r.unitary(x[k:k + r.size]))
        k += r.size
    return out
