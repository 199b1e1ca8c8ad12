"""
Steering and entanglement criteria over measured outcome distributions.

The pipeline is: a Scenario assigns a MeasurementSet to each party and marks the
trusted ones; `assemblage` turns a state into one joint distribution per setting; each
criterion reduces those distributions to a left-hand side compared against an
uncertainty bound on the trusted side.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import prod
from typing import Literal, NamedTuple, Optional, Sequence

import numpy as np

from entrosteer.errors import (
    DimensionMismatch,
    InvalidPermutationMatrix,
    MarginalMismatch,
    OutOfRange,
    UnsupportedCombination,
)
from entrosteer.models.schemas import BoundValue, CriterionReport
from entrosteer.services import eur_bounds
from entrosteer.services.entropy import SHANNON_LIMIT, EntropyKind, ProbDist, entropy
from entrosteer.services.measurements import MeasurementSet
from entrosteer.services.quantum_core import DensityMatrix
from entrosteer.services.states import BlochParams, check_marginal_regular, correlation_matrix, extract_bloch, local_vectors

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9


# ─── Scenario and distributions ───────────────────────────────────────────────

@dataclass(frozen=True)
class Scenario:
    """
    Per-party measurement sets with a common number of settings. Setting m measures
    party k in parties[k][m]; `trusted` lists the parties bound by the uncertainty relation.
    """

    parties: tuple[MeasurementSet, ...]
    trusted: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        if len(self.parties) not in (2, 3):
            raise DimensionMismatch(f"scenarios have 2 or 3 parties, got {len(self.parties)}")
        counts = {len(p) for p in self.parties}
        if len(counts) != 1:
            raise DimensionMismatch(f"every party needs the same number of settings, got {sorted(counts)}")
        trusted = tuple(sorted(set(self.trusted)))
        if not trusted or len(trusted) == len(self.parties) or any(not 0 <= t < len(self.parties) for t in trusted):
            raise DimensionMismatch(f"trusted parties {self.trusted} must be a non-empty proper subset")
        object.__setattr__(self, "trusted", trusted)

    @classmethod
    def bipartite(cls, alice: MeasurementSet, bob: MeasurementSet, name: str = "") -> "Scenario":
        """Alice untrusted, Bob trusted."""
        return cls((alice, bob), (1,), name)

    @classmethod
    def tripartite(cls, a: MeasurementSet, b: MeasurementSet, c: MeasurementSet,
                   trusted: Sequence[int], name: str = "") -> "Scenario":
        return cls((a, b, c), tuple(trusted), name)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(p.dim for p in self.parties)

    @property
    def num_settings(self) -> int:
        return len(self.parties[0])

    @property
    def untrusted(self) -> tuple[int, ...]:
        return tuple(k for k in range(len(self.parties)) if k not in self.trusted)

    def trusted_set(self) -> MeasurementSet:
        """The single trusted party's measurement set."""
        if len(self.trusted) != 1:
            raise UnsupportedCombination("scenario has more than one trusted party")
        return self.parties[self.trusted[0]]

    def swapped(self) -> "Scenario":
        """Bipartite scenario with roles exchanged (Bob steering Alice)."""
        if len(self.parties) != 2:
            raise UnsupportedCombination("only bipartite scenarios can be swapped")
        return Scenario((self.parties[1], self.parties[0]), (1,), f"{self.name}-reversed")


@dataclass(frozen=True)
class SettingDistributions:
    """Joint outcome grid per setting, axes ordered by party, plus the untrusted marginals."""

    joints: tuple[np.ndarray, ...]
    trusted: tuple[int, ...]
    marginals: tuple[np.ndarray, ...] = field(default=())

    def __post_init__(self):
        if not self.joints:
            raise DimensionMismatch("need at least one setting")
        derived = tuple(self._conditional(g)[1] for g in self.joints)
        if not self.marginals:
            object.__setattr__(self, "marginals", derived)
            return
        for given, computed in zip(self.marginals, derived):
            dev = float(np.max(np.abs(np.asarray(given).reshape(-1) - computed)))
            if dev > 1e-9:
                raise MarginalMismatch(f"untrusted marginal off by {dev:.3e}", deviation=dev)

    @property
    def untrusted(self) -> tuple[int, ...]:
        return tuple(k for k in range(self.joints[0].ndim) if k not in self.trusted)

    def _conditional(self, grid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        order = self.untrusted + self.trusted
        moved = np.transpose(grid, order)
        n_untrusted = prod(grid.shape[k] for k in self.untrusted)
        mat = moved.reshape(n_untrusted, -1)
        return mat, mat.sum(axis=1)

    def conditional_grid(self, m: int) -> np.ndarray:
        """Setting m as a matrix: rows untrusted outcomes, columns trusted outcomes."""
        return self._conditional(self.joints[m])[0]

    def __len__(self) -> int:
        return len(self.joints)


def assemblage(rho: DensityMatrix, scenario: Scenario) -> SettingDistributions:
    """p_{ij…} = Tr[(Π_i ⊗ Π_j ⊗ …)ρ] for each setting."""
    dims = scenario.dims
    if rho.dim != prod(dims):
        raise DimensionMismatch(f"state of dimension {rho.dim} does not factor as {dims}")
    joints = []
    for m in range(scenario.num_settings):
        vectors = scenario.parties[0][m].vectors
        for party in scenario.parties[1:]:
            vectors = np.kron(vectors, party[m].vectors)
        probs = np.real(np.einsum("ik,ij,jk->k", np.conj(vectors), rho.matrix, vectors))
        joints.append(ProbDist.of(probs.reshape(dims)).probs)
    return SettingDistributions(tuple(joints), scenario.trusted)


# ─── Reports ──────────────────────────────────────────────────────────────────

def _report(criterion: str, lhs: float, bound: BoundValue, terms: Sequence[float],
            parameter: Optional[float] = None, tol: float = DEFAULT_TOL,
            notes: Sequence[str] = ()) -> CriterionReport:
    return CriterionReport(
        criterion=criterion,
        lhs=float(lhs),
        bound=bound,
        violated=bool(lhs < bound.value - tol),
        terms=[float(t) for t in terms],
        tolerance=tol,
        parameter=parameter,
        rests_on_conjecture=bound.provenance != "analytic",
        notes=[*bound.notes, *notes],
    )


# ─── Per-setting terms ────────────────────────────────────────────────────────

def _shannon_term(grid: np.ndarray, marg: np.ndarray) -> float:
    """S(B|A) = −Σ p_ij ln(p_ij / p_i)."""
    rows, cols = np.nonzero(grid > 0)
    p = grid[rows, cols]
    return float(-np.sum(p * np.log(p / marg[rows])))


def _tsallis_term(grid: np.ndarray, marg: np.ndarray, q: float) -> float:
    """(1/(q−1))[1 − Σ_ij p_ij^q / p_i^(q−1)]; rows with p_i = 0 contribute nothing."""
    if abs(q - 1) < SHANNON_LIMIT:
        return _shannon_term(grid, marg)
    rows, cols = np.nonzero(grid > 0)
    p = grid[rows, cols]
    return float((1 - np.sum(p ** q * marg[rows] ** (1 - q))) / (q - 1))


def _renyi_term(grid: np.ndarray, marg: np.ndarray, r: float) -> float:
    """(1/(1−r)) ln Σ_ij p_ij^r p_i^(1−r)."""
    if abs(r - 1) < SHANNON_LIMIT:
        return _shannon_term(grid, marg)
    rows, cols = np.nonzero(grid > 0)
    p = grid[rows, cols]
    return float(np.log(np.sum(p ** r * marg[rows] ** (1 - r))) / (1 - r))


def _terms(dists: SettingDistributions, fn, *args) -> list[float]:
    return [fn(dists.conditional_grid(m), dists.marginals[m], *args) for m in range(len(dists))]


# ─── Bipartite entropic criteria ──────────────────────────────────────────────

def steering_shannon(dists: SettingDistributions, bound: BoundValue, tol: float = DEFAULT_TOL) -> CriterionReport:
    """Σ_m S(B_m|A_m) ≥ B."""
    terms = _terms(dists, _shannon_term)
    return _report("shannon", sum(terms), bound, terms, tol=tol)


def steering_tsallis(dists: SettingDistributions, q: float, bound: BoundValue,
                     tol: float = DEFAULT_TOL) -> CriterionReport:
    """(1/(q−1)) Σ_m [1 − Σ_ij (p_ij^(m))^q / (p_i^(m))^(q−1)] ≥ B^(q)."""
    if q <= 0:
        raise OutOfRange(f"q must be > 0, got {q}", name="q", value=q)
    terms = _terms(dists, _tsallis_term, q)
    return _report("tsallis", sum(terms), bound, terms, parameter=q, tol=tol)


def steering_renyi(dists: SettingDistributions, r: float, bound: BoundValue,
                   tol: float = DEFAULT_TOL) -> CriterionReport:
    """(1/(1−r)) Σ_m ln[Σ_ij (p_ij^(m))^r (p_i^(m))^(1−r)] ≥ B̃^(r)."""
    if r <= 0:
        raise OutOfRange(f"r must be > 0, got {r}", name="r", value=r)
    terms = _terms(dists, _renyi_term, r)
    return _report("renyi", sum(terms), bound, terms, parameter=r, tol=tol)


def steering_entropic(dists: SettingDistributions, kind: EntropyKind, bound: BoundValue,
                      tol: float = DEFAULT_TOL) -> CriterionReport:
    if kind.is_shannon:
        return steering_shannon(dists, bound, tol)
    if kind.variant == "tsallis":
        return steering_tsallis(dists, kind.parameter, bound, tol)
    return steering_renyi(dists, kind.parameter, bound, tol)


# ─── Global observables ───────────────────────────────────────────────────────

def merge_global_outcomes(grid: np.ndarray, values_a: np.ndarray, values_b: np.ndarray) -> np.ndarray:
    """Combine local outcome pairs that share the eigenvalue a·b of A⊗B."""
    products = np.round(np.outer(values_a, values_b), 12)
    merged = {}
    for key, p in zip(products.reshape(-1), grid.reshape(-1)):
        merged[key] = merged.get(key, 0.0) + p
    return np.array([merged[k] for k in sorted(merged)])


def guhne_global(rho: DensityMatrix, scenario: Scenario, kind: EntropyKind, bound: BoundValue,
                 tol: float = DEFAULT_TOL) -> CriterionReport:
    """Σ_m S(A_m ⊗ B_m) over the merged global-outcome distribution ≥ B_B."""
    if len(scenario.parties) != 2:
        raise UnsupportedCombination("the global-observable criterion is bipartite")
    dists = assemblage(rho, scenario)
    alice, bob = scenario.parties
    terms = []
    for m, grid in enumerate(dists.joints):
        merged = merge_global_outcomes(grid, alice[m].values, bob[m].values)
        terms.append(entropy(ProbDist.of(merged), kind))
    return _report("guhne", sum(terms), bound, terms, parameter=kind.parameter, tol=tol)


# ─── Permutation-matrix recombination ─────────────────────────────────────────

@dataclass(frozen=True)
class PermutationMatrix:
    """
    Symbol grid indexed [Alice outcome i, Bob outcome j], symbols 0..n_B−1. Each row
    must be a permutation of the symbol set.
    """

    symbols: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.symbols)
        if s.ndim != 2:
            raise InvalidPermutationMatrix(f"permutation matrix must be 2-d, got shape {s.shape}")
        n_b = s.shape[1]
        for i, row in enumerate(s):
            if sorted(row.tolist()) != list(range(n_b)):
                raise InvalidPermutationMatrix(f"row {i} = {row.tolist()} is not a permutation of 0..{n_b - 1}")
        object.__setattr__(self, "symbols", s.astype(int))

    @classmethod
    def from_printed(cls, printed: Sequence[Sequence[int]]) -> "PermutationMatrix":
        """Printed layouts list Bob's outcome as the row index; transpose into Alice-first."""
        return cls(np.asarray(printed, dtype=int).T)

    @classmethod
    def identity(cls, n_a: int, n_b: int) -> "PermutationMatrix":
        """Every row (0, 1, …): recombination yields Bob's marginal."""
        return cls(np.tile(np.arange(n_b), (n_a, 1)))

    def recombine(self, grid: np.ndarray) -> np.ndarray:
        """r_t = Σ_ij δ(q_ij, s_t) p_ij."""
        if grid.shape != self.symbols.shape:
            raise DimensionMismatch(f"grid {grid.shape} does not match permutation matrix {self.symbols.shape}")
        return np.bincount(self.symbols.reshape(-1), weights=grid.reshape(-1), minlength=self.symbols.shape[1])


def huang_permutation(grids: Sequence[np.ndarray], q_mats: Sequence[PermutationMatrix], f: EntropyKind,
                      bound: BoundValue, tol: float = DEFAULT_TOL) -> CriterionReport:
    """Σ_k f(recombined distribution of setting k) ≥ Bob's uncertainty bound."""
    if len(grids) != len(q_mats):
        raise DimensionMismatch(f"{len(grids)} grids but {len(q_mats)} permutation matrices")
    terms = [entropy(ProbDist.of(qm.recombine(np.asarray(g))), f) for g, qm in zip(grids, q_mats)]
    return _report("huang", sum(terms), bound, terms, parameter=f.parameter, tol=tol)


# ─── Two-qubit closed forms ───────────────────────────────────────────────────

def two_qubit_q2_terms(a, b, c) -> np.ndarray:
    """Per-axis [1 − a² − b² − c² + 2abc] / (2(1 − a²)); broadcasts over leading axes."""
    a, b, c = (np.asarray(v, dtype=float) for v in (a, b, c))
    return (1 - a ** 2 - b ** 2 - c ** 2 + 2 * a * b * c) / (2 * (1 - a ** 2))


def global_q2_terms(c) -> np.ndarray:
    """q = 2 entropy (1 − c²)/2 of the merged σ_i⊗σ_i outcomes ((1 + c_i)/2, (1 − c_i)/2)."""
    c = np.asarray(c, dtype=float)
    return (1 - c ** 2) / 2


def linear_criterion(c: Sequence[float], tol: float = DEFAULT_TOL) -> CriterionReport:
    """
    Steerable if √(Σ c_i²) > 1. Reported as lhs = Σ_i (1 − c_i²)/2 against bound 1, which
    is the same condition.
    """
    c = np.asarray(c, dtype=float)
    terms = global_q2_terms(c)
    bound = BoundValue(value=1.0, provenance="analytic", tag="linear")
    return _report("linear", float(terms.sum()), bound, terms, tol=tol,
                   notes=[f"correlation norm {np.linalg.norm(c):.6f}"])


def closed_form_two_qubit_q2(p: BlochParams, tol: float = DEFAULT_TOL) -> CriterionReport:
    """Σ_i [1 − a_i² − b_i² − c_i² + 2a_i b_i c_i] / (2(1 − a_i²)) ≥ 1 for Pauli settings at q = 2."""
    check_marginal_regular(np.asarray(p.a, dtype=float))
    terms = two_qubit_q2_terms(p.a, p.b, p.c)
    bound = eur_bounds.bound_tsallis_mub(2, 3, 2.0)
    return _report("two-qubit-q2", float(terms.sum()), bound, terms, parameter=2.0, tol=tol)


def two_qubit_directions(rho: DensityMatrix, us: Sequence[Sequence[float]], vs: Sequence[Sequence[float]],
                         q: float, bound: BoundValue, tol: float = DEFAULT_TOL) -> CriterionReport:
    """
    Tsallis criterion for Alice measuring u_m·σ and Bob v_m·σ, from the Bloch data:
    p(s, t) = ¼[1 + s a·u + t b·v + s t u·T·v].
    """
    if len(us) != len(vs):
        raise DimensionMismatch("need one Bob direction per Alice direction")
    a, b = local_vectors(rho)
    t_mat = correlation_matrix(rho)
    terms = []
    for u, v in zip(us, vs):
        u = np.asarray(u, dtype=float) / np.linalg.norm(u)
        v = np.asarray(v, dtype=float) / np.linalg.norm(v)
        signs = np.array([1.0, -1.0])
        grid = 0.25 * (1 + np.add.outer(signs * (a @ u), signs * (b @ v)) + np.outer(signs, signs) * (u @ t_mat @ v))
        grid = np.clip(grid, 0.0, None)
        terms.append(_tsallis_term(grid, grid.sum(axis=1), q))
    return _report("two-qubit-directions", sum(terms), bound, terms, parameter=q, tol=tol)


# ─── Isotropic closed form ────────────────────────────────────────────────────

def closed_form_isotropic(d: int, m: int, q: float, alpha: float, tol: float = DEFAULT_TOL) -> CriterionReport:
    """(m/(q−1))·{1 − d^(−q)[(1+(d−1)α)^q + (d−1)(1−α)^q]} against the m-MUB Tsallis bound."""
    if d < 2:
        raise OutOfRange(f"d must be >= 2, got {d}", name="d", value=d)
    if not -1.0 / (d * d - 1) - 1e-12 <= alpha <= 1 + 1e-12:
        raise OutOfRange(f"alpha={alpha} outside [{-1.0 / (d * d - 1):g}, 1]", name="alpha", value=alpha)
    hit = (1 + (d - 1) * alpha) / d          # conditional probability of the matching outcome
    miss = (1 - alpha) / d
    if abs(q - 1) < SHANNON_LIMIT:
        term = -sum(x * np.log(x) * k for x, k in ((hit, 1), (miss, d - 1)) if x > 0)
    else:
        term = (1 - d ** (-q) * ((1 + (d - 1) * alpha) ** q + (d - 1) * (1 - alpha) ** q)) / (q - 1)
    bound = eur_bounds.bound_tsallis_mub(d, m, q)
    return _report("isotropic", m * term, bound, [term] * m, parameter=q, tol=tol)


# ─── One-way steerable family ─────────────────────────────────────────────────

class Window(NamedTuple):
    lower: float
    upper: float

    @property
    def empty(self) -> bool:
        return self.lower >= self.upper


def one_way_window(theta: float, m: int) -> Window:
    """
    Visibilities β in (lower, upper] where the q = 2 criterion detects A→B steering of
    the one-way family while B→A stays unsteerable for m Pauli settings.
    """
    if not 0 < theta < np.pi / 4:
        raise OutOfRange(f"theta must lie in (0, π/4), got {theta}", name="theta", value=theta)
    s2 = np.sin(2 * theta)
    if m == 2:
        lower = 1 / np.sqrt(1 + s2)
        upper = 1 / np.sqrt(1 + s2 ** 2)
    elif m == 3:
        lower = np.sqrt(3 - np.sqrt(1 + 8 * s2 ** 2)) / (2 * np.cos(2 * theta))
        upper = 1 / np.sqrt(1 + 2 * s2 ** 2)
    else:
        raise OutOfRange(f"one-way windows exist for m = 2 or 3, got {m}", name="m", value=m)
    return Window(float(lower), float(upper))


# ─── Tripartite ───────────────────────────────────────────────────────────────

def _require(dists: SettingDistributions, untrusted: tuple[int, ...], label: str) -> None:
    if dists.untrusted != untrusted:
        raise UnsupportedCombination(f"{label} needs untrusted parties {untrusted}, got {dists.untrusted}")


def tripartite_a_to_bc(dists: SettingDistributions, q: float, bound: BoundValue,
                       tol: float = DEFAULT_TOL) -> CriterionReport:
    """(1/(q−1)) Σ_m [1 − Σ_ijk (p_ijk)^q / (p_i)^(q−1)] ≥ C_BC^(q)."""
    _require(dists, (0,), "A→BC")
    if dists.joints[0].ndim != 3:
        raise UnsupportedCombination("A→BC needs three-party distributions")
    terms = _terms(dists, _tsallis_term, q)
    return _report("a-to-bc", sum(terms), bound, terms, parameter=q, tol=tol)


def tripartite_ab_to_c(dists: SettingDistributions, q: float, bound: BoundValue,
                       tol: float = DEFAULT_TOL) -> CriterionReport:
    """
    (1/(q−1)) Σ_m [1 − Σ_ijk (p_ijk)^q / (p_ij)^(q−1)] ≥ B_C^(q). Accepts local
    three-party grids or global-AB grids where AB is one 4-outcome party.
    """
    if dists.joints[0].ndim == 3:
        _require(dists, (0, 1), "AB→C")
    else:
        _require(dists, (0,), "AB→C (global)")
    terms = _terms(dists, _tsallis_term, q)
    return _report("ab-to-c", sum(terms), bound, terms, parameter=q, tol=tol)


# ─── Configured evaluation ────────────────────────────────────────────────────

CriterionName = Literal["entropic", "guhne", "linear", "two-qubit-q2", "a-to-bc", "ab-to-c"]


def default_bound(kind: EntropyKind, scenario: Scenario, composite: str = "separable") -> BoundValue:
    """Catalogue bound for the trusted side of a scenario."""
    m = scenario.num_settings
    if len(scenario.trusted) == 1:
        trusted = scenario.trusted_set()
        if m > 1 and not trusted.unbiased:
            raise UnsupportedCombination("trusted measurements are not mutually unbiased; certify a bound numerically")
        return eur_bounds.bound_single(kind, trusted.dim, m)
    b, c = (scenario.parties[k] for k in scenario.trusted)
    if not (b.unbiased and c.unbiased):
        raise UnsupportedCombination("trusted measurements are not mutually unbiased; certify a bound numerically")
    return eur_bounds.bound_composite(b.dim, c.dim, m, kind, composite)


@dataclass(frozen=True)
class CriterionConfig:
    """Everything needed to turn a state into a CriterionReport."""

    kind: EntropyKind
    scenario: Scenario
    criterion: CriterionName = "entropic"
    bound: Optional[BoundValue] = None
    composite: str = "separable"          # bound family when two parties are trusted
    tolerance: float = DEFAULT_TOL

    def resolved_bound(self) -> BoundValue:
        if self.bound is not None:
            return self.bound
        if self.criterion in ("linear", "two-qubit-q2"):
            return eur_bounds.bound_tsallis_mub(2, 3, 2.0)
        return default_bound(self.kind, self.scenario, self.composite)

    def with_scenario(self, scenario: Scenario) -> "CriterionConfig":
        return CriterionConfig(self.kind, scenario, self.criterion, self.bound, self.composite, self.tolerance)

    def evaluate(self, rho: DensityMatrix) -> CriterionReport:
        tol = self.tolerance
        if self.criterion == "linear":
            return linear_criterion(extract_bloch(rho).c, tol)
        if self.criterion == "two-qubit-q2":
            return closed_form_two_qubit_q2(extract_bloch(rho), tol)

        bound = self.resolved_bound()
        if self.criterion == "guhne":
            return guhne_global(rho, self.scenario, self.kind, bound, tol)

        dists = assemblage(rho, self.scenario)
        if self.criterion == "a-to-bc" or (self.criterion == "entropic" and len(self.scenario.trusted) == 2):
            return tripartite_a_to_bc(dists, self._q(), bound, tol)
        if self.criterion == "ab-to-c" or (self.criterion == "entropic" and len(self.scenario.parties) == 3):
            return tripartite_ab_to_c(dists, self._q(), bound, tol)
        return steering_entropic(dists, self.kind, bound, tol)

    def _q(self) -> float:
        if self.kind.variant == "renyi" and not self.kind.is_shannon:
            raise UnsupportedCombination("tripartite criteria are defined for Shannon and Tsallis entropies")
        return 1.0 if self.kind.is_shannon else self.kind.parameter
