"""
Random-state survey: how often Hilbert–Schmidt random two-qubit states violate the
general q = 2 two-qubit criterion, the global-observable criterion, and the linear
criterion, after bringing each sample to its Bloch normal form.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np
from scipy.stats import norm

from entrosteer.config import get_settings
from entrosteer.errors import OutOfRange
from entrosteer.models.schemas import SurveyRow, SurveyTable
from entrosteer.services import eur_bounds
from entrosteer.services.criteria import global_q2_terms, two_qubit_q2_terms
from entrosteer.services.measurements import PAULI_MATRICES
from entrosteer.services.quantum_core import make_rng, random_density_hs_batch

logger = logging.getLogger(__name__)

CRITERIA = ("general", "guhne", "linear")

_EYE = np.eye(2)
_SIGMAS = [PAULI_MATRICES[k] for k in "xyz"]
_LOCAL_A = np.stack([np.kron(s, _EYE) for s in _SIGMAS])
_LOCAL_B = np.stack([np.kron(_EYE, s) for s in _SIGMAS])
_CORR = np.stack([[np.kron(si, sj) for sj in _SIGMAS] for si in _SIGMAS])


def bloch_batch(rhos: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Local vectors (n, 3), (n, 3) and correlation matrices (n, 3, 3) of a stack of states."""
    a = np.real(np.einsum("kij,nji->nk", _LOCAL_A, rhos))
    b = np.real(np.einsum("kij,nji->nk", _LOCAL_B, rhos))
    t = np.real(np.einsum("klij,nji->nkl", _CORR, rhos))
    return a, b, t


def normal_form(a: np.ndarray, b: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Local rotations O_A, O_B ∈ SO(3) making the correlation matrix diagonal:
    T = U diag(s) Vᵀ, with a reflection moved into the sign of the last singular value.
    Returns (O_A a, O_B b, signed diagonal).
    """
    u, s, vt = np.linalg.svd(t)
    v = np.transpose(vt, (0, 2, 1))
    s = s.copy()
    for mat in (u, v):
        flip = np.linalg.det(mat) < 0
        mat[flip, :, 2] *= -1
        s[flip, 2] *= -1
    a_rot = np.einsum("nji,nj->ni", u, a)
    b_rot = np.einsum("nji,nj->ni", v, b)
    return a_rot, b_rot, s


def criteria_violations(a: np.ndarray, b: np.ndarray, c: np.ndarray, tol: float) -> dict[str, np.ndarray]:
    """Boolean violation masks per criterion for normal-form Bloch data, rows are samples."""
    bound = eur_bounds.bound_tsallis_mub(2, 3, 2.0).value
    general = np.sum(two_qubit_q2_terms(a, b, c), axis=1)
    # the global-observable and linear criteria share the merged σ_i⊗σ_i terms
    merged = np.sum(global_q2_terms(c), axis=1)
    return {
        "general": general < bound - tol,
        "guhne": merged < bound - tol,
        "linear": merged < 1 - tol,
    }


def wilson_interval(count: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    z = norm.ppf(0.5 + confidence / 2)
    p = count / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    # the bounds are exact at the edges; rounding would leave them a few ulp inside
    lo = 0.0 if count == 0 else max(0.0, centre - half)
    hi = 1.0 if count == n else min(1.0, centre + half)
    return lo, hi


def _shard_counts(seed: int, shard: int, size: int, chosen: Sequence[str], tol: float) -> dict[str, int]:
    rng = make_rng(seed, shard)
    rhos = random_density_hs_batch(4, size, rng)
    a, b, c = normal_form(*bloch_batch(rhos))
    masks = criteria_violations(a, b, c, tol)
    masks = {k: masks[k] for k in chosen}
    stack = np.stack([masks[k] for k in chosen])

    counts = {k: int(masks[k].sum()) for k in chosen}
    counts["none"] = int((~stack.any(axis=0)).sum())
    counts["all"] = int(stack.all(axis=0).sum())
    for i, k in enumerate(chosen):
        others = np.delete(stack, i, axis=0)
        alone = stack[i] & ~others.any(axis=0) if len(others) else stack[i]
        counts[f"only-{k}"] = int(alone.sum())
    if "linear" in masks and "general" in masks:
        counts["linear-without-general"] = int((masks["linear"] & ~masks["general"]).sum())
    logger.debug(f"shard {shard}: {size} samples, none={counts['none']}")
    return counts


def survey_random(n: int, seed: int = 0, criteria: Optional[Sequence[str]] = None,
                  batch_size: Optional[int] = None, threads: int = 1) -> SurveyTable:
    """
    Sample n HS random two-qubit states in shards of `batch_size`; shard k draws from
    make_rng(seed, k), so the table depends only on (n, seed, batch_size).
    """
    if n < 1:
        raise OutOfRange(f"survey needs n >= 1, got {n}", name="n", value=n)
    chosen = list(criteria or CRITERIA)
    unknown = [c for c in chosen if c not in CRITERIA]
    if unknown:
        raise OutOfRange(f"unknown survey criteria {unknown}; choose from {list(CRITERIA)}", name="criteria")

    settings = get_settings()
    batch_size = batch_size or settings.survey_batch_size
    tol = settings.violation_tol
    sizes = [min(batch_size, n - start) for start in range(0, n, batch_size)]

    def run(shard: int) -> dict[str, int]:
        return _shard_counts(seed, shard, sizes[shard], chosen, tol)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            shard_counts = list(pool.map(run, range(len(sizes))))
    else:
        shard_counts = [run(k) for k in range(len(sizes))]

    totals: dict[str, int] = {}
    for counts in shard_counts:
        for key, value in counts.items():
            totals[key] = totals.get(key, 0) + value

    rows = []
    for key, count in totals.items():
        lo, hi = wilson_interval(count, n)
        rows.append(SurveyRow(category=key, count=count, fraction=count / n, ci_low=lo, ci_high=hi))
    logger.info(f"survey n={n} seed={seed}: " + ", ".join(f"{r.category}={r.fraction:.4f}" for r in rows))
    return SurveyTable(n=n, seed=seed, rows=rows)
