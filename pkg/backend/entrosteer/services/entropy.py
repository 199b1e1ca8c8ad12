"""
Classical entropies over outcome distributions: Shannon, Tsallis and Rényi
entropies, the q-logarithm, conditional Tsallis entropy, relative entropies, and the
non-additive correction terms that appear in the Tsallis steering criteria.

Everything here is in nats. A Tsallis or Rényi parameter within 1e-9 of 1 is routed
to the Shannon branch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional, Sequence, Union

import numpy as np

from entrosteer.errors import DomainError, InfiniteDivergence, InvalidDistribution, MarginalMismatch

SUM_TOL = 1e-9
NEGATIVE_FLOOR = -1e-12
SHANNON_LIMIT = 1e-9


# ─── Domain types ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class ProbDist:
    """Non-negative weights summing to 1. May be multi-dimensional (a joint grid)."""

    probs: np.ndarray

    def __post_init__(self):
        self.probs.setflags(write=False)

    @classmethod
    def of(cls, values: Union["ProbDist", Sequence, np.ndarray]) -> "ProbDist":
        """Clamp entries in [−1e-12, 0) to 0 and renormalise when |Σp − 1| ≤ 1e-9."""
        if isinstance(values, ProbDist):
            return values
        p = np.array(values, dtype=float)
        if p.size == 0:
            raise InvalidDistribution("empty distribution")
        if not np.all(np.isfinite(p)):
            raise InvalidDistribution("distribution has non-finite entries")
        if np.any(p < NEGATIVE_FLOOR):
            raise InvalidDistribution(f"negative probability {p.min():.3e}")
        p = np.clip(p, 0.0, None)
        total = float(p.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise InvalidDistribution(f"probabilities sum to {total!r}, not 1")
        return cls(p / total)

    @property
    def flat(self) -> np.ndarray:
        return self.probs.reshape(-1)

    def __len__(self) -> int:
        return self.probs.size


@dataclass(frozen=True)
class EntropyKind:
    variant: Literal["shannon", "tsallis", "renyi"]
    parameter: Optional[float] = None

    def __post_init__(self):
        if self.variant == "shannon":
            return
        if self.parameter is None or not self.parameter > 0:
            raise DomainError(f"{self.variant} entropy needs a parameter > 0, got {self.parameter}")

    @classmethod
    def shannon(cls) -> "EntropyKind":
        return cls("shannon")

    @classmethod
    def tsallis(cls, q: float) -> "EntropyKind":
        return cls("tsallis", float(q))

    @classmethod
    def renyi(cls, r: float) -> "EntropyKind":
        return cls("renyi", float(r))

    @property
    def is_shannon(self) -> bool:
        return self.variant == "shannon" or abs(self.parameter - 1.0) < SHANNON_LIMIT

    @property
    def label(self) -> str:
        if self.variant == "shannon":
            return "shannon"
        key = "q" if self.variant == "tsallis" else "r"
        return f"{self.variant}({key}={self.parameter:g})"


Dist = Union[ProbDist, Sequence, np.ndarray]


# ─── q-logarithm ──────────────────────────────────────────────────────────────

def q_log(x, q: float):
    """ln_q(x) = (x^(1−q) − 1)/(1 − q); natural log when |q − 1| < 1e-9. Vectorised over x."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0):
        raise DomainError(f"q_log needs x > 0, got {x}")
    if abs(q - 1.0) < SHANNON_LIMIT:
        out = np.log(arr)
    else:
        out = (np.power(arr, 1.0 - q) - 1.0) / (1.0 - q)
    return float(out) if out.ndim == 0 else out


def _power_sum(p: np.ndarray, a: float) -> float:
    """Σ p_i^a over the support (0^a ≡ 0)."""
    nz = p[p > 0]
    return float(np.sum(nz ** a))


# ─── Entropies ────────────────────────────────────────────────────────────────

def shannon(p: Dist) -> float:
    nz = ProbDist.of(p).flat
    nz = nz[nz > 0]
    return float(-np.sum(nz * np.log(nz)))


def tsallis(p: Dist, q: float) -> float:
    if abs(q - 1.0) < SHANNON_LIMIT:
        return shannon(p)
    return (1.0 - _power_sum(ProbDist.of(p).flat, q)) / (q - 1.0)


def renyi(p: Dist, r: float) -> float:
    if abs(r - 1.0) < SHANNON_LIMIT:
        return shannon(p)
    flat = ProbDist.of(p).flat
    nz = flat[flat > 0]
    # log-sum-exp keeps large r (min-entropy limit) from underflowing
    pmax = nz.max()
    log_sum = r * np.log(pmax) + np.log(np.sum((nz / pmax) ** r))
    return float(log_sum / (1.0 - r))


def entropy(p: Dist, kind: EntropyKind) -> float:
    if kind.is_shannon:
        return shannon(p)
    if kind.variant == "tsallis":
        return tsallis(p, kind.parameter)
    return renyi(p, kind.parameter)


def min_entropy(p: Dist) -> float:
    return float(-np.log(ProbDist.of(p).flat.max()))


# ─── Joint / conditional ──────────────────────────────────────────────────────

def marginal(joint: Dist, keep: Sequence[int]) -> ProbDist:
    """Sum a joint grid over every axis not in `keep`."""
    grid = ProbDist.of(joint).probs
    drop = tuple(ax for ax in range(grid.ndim) if ax not in keep)
    return ProbDist(np.array(grid.sum(axis=drop), dtype=float))


def _as_grid(joint: Dist, marginal_dist: Optional[Dist] = None) -> tuple[np.ndarray, np.ndarray]:
    """
    Joint distribution as (untrusted outcomes) × (trusted outcomes), plus the untrusted
    marginal. A supplied marginal is checked against the grid's row sums.
    """
    grid = ProbDist.of(joint).probs
    if marginal_dist is None:
        if grid.ndim < 2:
            raise MarginalMismatch("a 1-d joint distribution needs an explicit marginal", deviation=float("nan"))
        grid = grid.reshape(grid.shape[0], -1)
        return grid, grid.sum(axis=1)

    marg = ProbDist.of(marginal_dist).flat
    if grid.size % marg.size:
        raise MarginalMismatch(
            f"joint of size {grid.size} does not factor over a marginal of size {marg.size}",
            deviation=float("nan"),
        )
    grid = grid.reshape(marg.size, -1)
    deviation = float(np.max(np.abs(grid.sum(axis=1) - marg)))
    if deviation > SUM_TOL:
        raise MarginalMismatch(f"marginal disagrees with joint by {deviation:.3e}", deviation=deviation)
    return grid, marg


def conditional_tsallis(joint: Dist, marginal_dist: Optional[Dist], q: float) -> float:
    """S_q(B|A) = S_q(A,B) − S_q(A); Shannon conditional entropy at q → 1."""
    grid, marg = _as_grid(joint, marginal_dist)
    return tsallis(grid, q) - tsallis(marg, q)


def conditional_shannon(joint: Dist, marginal_dist: Optional[Dist] = None) -> float:
    grid, marg = _as_grid(joint, marginal_dist)
    return shannon(grid) - shannon(marg)


def correction_term(joint: Dist, q: float, marginal_dist: Optional[Dist] = None) -> float:
    """
    Σ_i p_i^q [ln_q p_i]² − Σ_ij p_ij^q ln_q(p_i) ln_q(p_ij), with i the untrusted
    outcome. Zero-probability cells contribute 0.
    """
    grid, marg = _as_grid(joint, marginal_dist)
    if abs(q - 1.0) < SHANNON_LIMIT:
        return 0.0

    first = 0.0
    for p_i in marg[marg > 0]:
        first += p_i ** q * q_log(p_i, q) ** 2

    second = 0.0
    rows, cols = np.nonzero(grid > 0)
    for i, j in zip(rows, cols):
        p_ij = grid[i, j]
        # p^q ln_q(p) = (p − p^q)/(1 − q) stays finite as p → 0
        second += q_log(marg[i], q) * (p_ij - p_ij ** q) / (1.0 - q)
    return float(first - second)


def correction_bipartite(joint: Dist, q: float) -> float:
    """C(A,B) for a grid indexed [i_A, j_B]."""
    return correction_term(joint, q)


def correction_a_to_bc(joint: Dist, q: float) -> float:
    """T_q^(1): Alice's outcome i is untrusted, (j, k) trusted. Grid indexed [i, j, k]."""
    grid = ProbDist.of(joint).probs
    return correction_term(grid.reshape(grid.shape[0], -1), q)


def correction_ab_to_c(joint: Dist, q: float) -> float:
    """T_q^(2): the pair (i, j) is untrusted, Charlie's k trusted. Grid indexed [i, j, k]."""
    grid = ProbDist.of(joint).probs
    return correction_term(grid.reshape(-1, grid.shape[-1]), q)


# ─── Relative entropies ───────────────────────────────────────────────────────

def _parameter_at_least_one(kind: EntropyKind) -> bool:
    return kind.is_shannon or kind.parameter > 1.0


def relative_entropy(p: Dist, q_dist: Dist, kind: EntropyKind) -> float:
    """
    D(p‖q), D_q(p‖q) = (Σ p^q q^(1−q) − 1)/(q − 1), or D̃_r(p‖q) = ln(Σ p^r q^(1−r))/(r − 1).

    Raises InfiniteDivergence when some q_i = 0 < p_i and the divergence is unbounded
    (Shannon, and Tsallis/Rényi with parameter ≥ 1).
    """
    pp = ProbDist.of(p).flat
    qq = ProbDist.of(q_dist).flat
    if pp.size != qq.size:
        raise InvalidDistribution(f"distributions have different sizes {pp.size} and {qq.size}")

    bad = np.nonzero((qq == 0) & (pp > 0))[0]
    if bad.size and _parameter_at_least_one(kind):
        raise InfiniteDivergence(
            f"support of p not contained in support of q at indices {bad.tolist()}",
            offending=bad.tolist(),
        )

    mask = pp > 0
    if kind.is_shannon:
        return float(np.sum(pp[mask] * np.log(pp[mask] / qq[mask])))

    a = kind.parameter
    both = mask & (qq > 0)
    overlap = float(np.sum(pp[both] ** a * qq[both] ** (1.0 - a)))
    if kind.variant == "tsallis":
        return (overlap - 1.0) / (a - 1.0)
    if overlap <= 0:
        raise InfiniteDivergence("distributions have disjoint supports", offending=np.nonzero(mask)[0].tolist())
    return float(np.log(overlap) / (a - 1.0))
