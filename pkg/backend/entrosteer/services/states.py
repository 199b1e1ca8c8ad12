"""
State families: isotropic/Werner, two-qubit Bloch form, the printed two-qubit examples,
the one-way steerable family, the bound-entangled qutrit family, noisy GHZ and W states,
plus partial trace and partial transpose.
"""

from __future__ import annotations

import logging
import string
from dataclasses import dataclass, field
from math import prod
from typing import Callable, Sequence, Union

import numpy as np

from entrosteer.errors import DimensionMismatch, OutOfRange, SingularMarginal
from entrosteer.services.measurements import PAULI_MATRICES
from entrosteer.services.quantum_core import (
    DensityMatrix,
    as_matrix,
    kron,
    kron_all,
    projector,
    validate_density,
)

logger = logging.getLogger(__name__)

_RANGE_EPS = 1e-12
_AXES = ("x", "y", "z")

MatrixLike = Union[DensityMatrix, np.ndarray]


def _matrix(rho: MatrixLike) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)


def _check_range(name: str, value: float, lo: float, hi: float) -> float:
    if not (lo - _RANGE_EPS <= value <= hi + _RANGE_EPS):
        raise OutOfRange(f"{name}={value} outside [{lo:g}, {hi:g}]", name=name, value=value)
    return float(value)


# ─── Partial operations ───────────────────────────────────────────────────────

def partial_trace(rho: MatrixLike, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in `keep`; kept order follows `dims`."""
    m = _matrix(rho)
    n = len(dims)
    if prod(dims) != m.shape[0]:
        raise DimensionMismatch(f"dims {tuple(dims)} do not factor a {m.shape[0]}-dim matrix")
    keep = sorted(set(keep))
    letters = string.ascii_letters
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, m.reshape(list(dims) * 2))
    dk = prod(dims[i] for i in keep)
    return reduced.reshape(dk, dk)


def partial_transpose(rho: MatrixLike, dims: Sequence[int], system: int) -> np.ndarray:
    m = _matrix(rho)
    n = len(dims)
    if prod(dims) != m.shape[0]:
        raise DimensionMismatch(f"dims {tuple(dims)} do not factor a {m.shape[0]}-dim matrix")
    t = m.reshape(list(dims) * 2)
    t = np.swapaxes(t, system, n + system)
    return t.reshape(m.shape)


def min_ppt_eigenvalue(rho: MatrixLike, dims: Sequence[int], system: int = 0) -> float:
    pt = partial_transpose(rho, dims, system)
    return float(np.min(np.linalg.eigvalsh(0.5 * (pt + np.conj(pt).T))))


# ─── Two-qubit Bloch form ─────────────────────────────────────────────────────

@dataclass(frozen=True)
class BlochParams:
    """ρ = ¼[I⊗I + a·σ⊗I + I⊗b·σ + Σ c_i σ_i⊗σ_i]."""

    a: np.ndarray = field(default_factory=lambda: np.zeros(3))
    b: np.ndarray = field(default_factory=lambda: np.zeros(3))
    c: np.ndarray = field(default_factory=lambda: np.zeros(3))

    @classmethod
    def of(cls, a=(0, 0, 0), b=(0, 0, 0), c=(0, 0, 0)) -> "BlochParams":
        return cls(np.asarray(a, dtype=float), np.asarray(b, dtype=float), np.asarray(c, dtype=float))


def _bloch_matrix(a, b, c) -> np.ndarray:
    eye = np.eye(2, dtype=np.complex128)
    m = np.kron(eye, eye)
    for i, axis in enumerate(_AXES):
        s = PAULI_MATRICES[axis]
        m = m + a[i] * np.kron(s, eye) + b[i] * np.kron(eye, s) + c[i] * np.kron(s, s)
    return m / 4


def two_qubit_bloch(p: BlochParams) -> DensityMatrix:
    return validate_density(_bloch_matrix(p.a, p.b, p.c))


def local_vectors(rho: MatrixLike) -> tuple[np.ndarray, np.ndarray]:
    m = _matrix(rho)
    eye = np.eye(2)
    a = np.array([np.real(np.trace(m @ np.kron(PAULI_MATRICES[k], eye))) for k in _AXES])
    b = np.array([np.real(np.trace(m @ np.kron(eye, PAULI_MATRICES[k]))) for k in _AXES])
    return a, b


def correlation_matrix(rho: MatrixLike) -> np.ndarray:
    """T_ij = Tr[ρ σ_i⊗σ_j]."""
    m = _matrix(rho)
    return np.array([[np.real(np.trace(m @ np.kron(PAULI_MATRICES[i], PAULI_MATRICES[j])))
                      for j in _AXES] for i in _AXES])


def extract_bloch(rho: MatrixLike) -> BlochParams:
    """Local vectors and the diagonal of the correlation matrix."""
    m = _matrix(rho)
    if m.shape != (4, 4):
        raise DimensionMismatch(f"extract_bloch needs a two-qubit state, got {m.shape}")
    a, b = local_vectors(m)
    return BlochParams(a, b, np.diag(correlation_matrix(m)).copy())


def werner(w: float) -> DensityMatrix:
    """w|ψ⁻⟩⟨ψ⁻| + (1−w)I/4."""
    _check_range("w", w, -1 / 3, 1.0)
    return two_qubit_bloch(BlochParams.of(c=(-w, -w, -w)))


def bell_diagonal(c: Sequence[float]) -> DensityMatrix:
    return two_qubit_bloch(BlochParams.of(c=c))


def singlet() -> DensityMatrix:
    return validate_density(projector(np.array([0, 1, -1, 0]) / np.sqrt(2)))


# ─── Isotropic ────────────────────────────────────────────────────────────────

def max_entangled_vector(d: int) -> np.ndarray:
    return np.eye(d, dtype=np.complex128).reshape(-1) / np.sqrt(d)


def isotropic(d: int, alpha: float) -> DensityMatrix:
    """α|φ⁺_d⟩⟨φ⁺_d| + (1−α)I/d², α ∈ [−1/(d²−1), 1]."""
    if d < 2:
        raise OutOfRange(f"isotropic needs d >= 2, got {d}", name="d", value=d)
    _check_range("alpha", alpha, -1.0 / (d * d - 1), 1.0)
    phi = projector(max_entangled_vector(d))
    return validate_density(alpha * phi + (1 - alpha) * np.eye(d * d) / (d * d))


# ─── Printed examples ─────────────────────────────────────────────────────────

_EXAMPLE_2 = np.array([
    [0.14, 0.09 - 0.18j, -0.12 + 0.17j, -0.06],
    [0.09 + 0.18j, 1.58, -1.72, -0.12 + 0.17j],
    [-0.12 - 0.17j, -1.72, 1.98, 0.09 - 0.18j],
    [-0.06, -0.12 - 0.17j, 0.09 + 0.18j, 0.3],
]) / 4

_EXAMPLE_3 = np.array([
    [0.06, -0.13, 0.16 + 0.02j, -0.02],
    [-0.13, 1.74, -1.82, 0.16 + 0.02j],
    [0.16 - 0.02j, -1.82, 1.96, -0.13],
    [-0.02, 0.16 - 0.02j, -0.13, 0.24],
]) / 4


def project_psd(m: np.ndarray, name: str = "state") -> np.ndarray:
    """Hermitise; clip eigenvalues below −1e-9 to zero and renormalise the trace."""
    h = 0.5 * (m + np.conj(m).T)
    evals, evecs = np.linalg.eigh(h)
    logger.debug(f"{name}: minimum eigenvalue {evals.min():.3e}")
    if evals.min() >= -1e-9:
        return h
    logger.warning(f"{name}: minimum eigenvalue {evals.min():.3e} < 0, projecting to the PSD cone")
    evals = np.clip(evals, 0.0, None)
    h = (evecs * evals) @ np.conj(evecs).T
    return h / np.real(np.trace(h))


def example_states() -> tuple[DensityMatrix, DensityMatrix]:
    """The two printed 4×4 example states, entries rounded to two decimals as printed."""
    return (
        validate_density(project_psd(_EXAMPLE_2, "example2")),
        validate_density(project_psd(_EXAMPLE_3, "example3")),
    )


# ─── Noise mixing ─────────────────────────────────────────────────────────────

def noisy_family(base: DensityMatrix, w: float) -> DensityMatrix:
    """w·base + (1−w)·I/d."""
    _check_range("w", w, 0.0, 1.0)
    d = base.dim
    return validate_density(w * base.matrix + (1 - w) * np.eye(d) / d)


def two_qutrit(x: float) -> DensityMatrix:
    """|ψ_x⟩ = (|00⟩ + x|11⟩ + |22⟩)/√(2 + x²)."""
    if x < 0:
        raise OutOfRange(f"x must be >= 0, got {x}", name="x", value=x)
    v = np.zeros(9, dtype=np.complex128)
    v[[0, 4, 8]] = [1.0, x, 1.0]
    return validate_density(projector(v / np.sqrt(2 + x * x)))


# ─── One-way steerable family ─────────────────────────────────────────────────

def one_way(beta: float, theta: float) -> DensityMatrix:
    """β|ψ(θ)⟩⟨ψ(θ)| + (1−β)(I/2)⊗ρ_B^θ with |ψ(θ)⟩ = cos θ|00⟩ + sin θ|11⟩."""
    _check_range("beta", beta, 0.0, 1.0)
    _check_range("theta", theta, 0.0, np.pi / 4)
    psi = np.array([np.cos(theta), 0, 0, np.sin(theta)], dtype=np.complex128)
    pure = projector(psi)
    rho_b = partial_trace(pure, (2, 2), keep=[1])
    return validate_density(beta * pure + (1 - beta) * kron(np.eye(2) / 2, rho_b))


def swap_parties(rho: MatrixLike, dims: Sequence[int]) -> DensityMatrix:
    """Exchange the two parties of a bipartite state."""
    da, db = dims
    t = _matrix(rho).reshape(da, db, da, db).transpose(1, 0, 3, 2)
    return validate_density(t.reshape(da * db, da * db))


# ─── Bound-entangled qutrit family ────────────────────────────────────────────

def _ket(*pairs: tuple[complex, int, int]) -> np.ndarray:
    v = np.zeros(9, dtype=np.complex128)
    for amp, i, j in pairs:
        v[3 * i + j] += amp
    return v


def bes_weights(m1: float, m2: float) -> tuple[float, float, float]:
    """(λ1, λ2, λ3) making the family PPT."""
    n = 4 - 2 * m1 * m1 + m1 * m2 - 2 * m2 * m2
    return 1 - (2 + 3 * m1 * m2) / n, 3 * m1 * m2 / n, 1 / n


def bes_admissible(m1: float, m2: float) -> bool:
    return m1 >= 0 and m2 >= 0 and m1 * m1 + m2 * m2 + m1 * m2 <= 1 + _RANGE_EPS


def bound_entangled(m1: float, m2: float) -> DensityMatrix:
    if not bes_admissible(m1, m2):
        raise OutOfRange(
            f"(m1, m2) = ({m1}, {m2}) outside m1, m2 >= 0, m1² + m2² + m1·m2 <= 1",
            name="m1,m2", value=m1 * m1 + m2 * m2 + m1 * m2,
        )
    m3 = np.sqrt(max(1 - m1 * m1 - m2 * m2, 0.0) / 2)
    l1, l2, l3 = bes_weights(m1, m2)
    r2 = 1 / np.sqrt(2)
    r3 = 1 / np.sqrt(3)
    psi1 = _ket((r2, 1, 2), (r2, 2, 1))
    psi2 = _ket((r3, 0, 0), (r3, 1, 1), (-r3, 2, 2))
    psi3 = _ket((m1, 0, 1), (m2, 1, 0), (m3, 1, 1), (m3, 2, 2))
    psi3t = _ket((m1, 0, 2), (-m2, 2, 0), (m3, 2, 1), (-m3, 1, 2))
    rho = l1 * projector(psi1) + l2 * projector(psi2) + l3 * (projector(psi3) + projector(psi3t))
    return validate_density(rho)


# ─── Three qubits ─────────────────────────────────────────────────────────────

def ghz_vector() -> np.ndarray:
    v = np.zeros(8, dtype=np.complex128)
    v[[0, 7]] = 1 / np.sqrt(2)
    return v


def w_vector() -> np.ndarray:
    v = np.zeros(8, dtype=np.complex128)
    v[[4, 2, 1]] = 1 / np.sqrt(3)          # |100⟩, |010⟩, |001⟩
    return v


def noisy_ghz(gamma: float) -> DensityMatrix:
    _check_range("gamma", gamma, 0.0, 1.0)
    return validate_density(gamma * projector(ghz_vector()) + (1 - gamma) * np.eye(8) / 8)


def noisy_w(delta: float) -> DensityMatrix:
    _check_range("delta", delta, 0.0, 1.0)
    return validate_density(delta * projector(w_vector()) + (1 - delta) * np.eye(8) / 8)


def product_state(*parts: MatrixLike) -> DensityMatrix:
    return validate_density(kron_all(_matrix(p) for p in parts))


# ─── Families addressable by a single noise parameter ─────────────────────────

@dataclass(frozen=True)
class StateFamily:
    """A one-parameter family ρ(t), t in [lo, hi], with the remaining parameters fixed."""

    name: str
    parameter_name: str
    build: Callable[[float], DensityMatrix]
    dims: tuple[int, ...]
    lo: float = 0.0
    hi: float = 1.0
    fixed: dict = field(default_factory=dict)

    def __call__(self, t: float) -> DensityMatrix:
        return self.build(t)


def check_marginal_regular(a: np.ndarray, tol: float = 1e-9) -> None:
    bad = [i for i, x in enumerate(a) if abs(x) >= 1 - tol]
    if bad:
        raise SingularMarginal(f"local Bloch components {bad} have |a_i| >= 1 − {tol:g}")
