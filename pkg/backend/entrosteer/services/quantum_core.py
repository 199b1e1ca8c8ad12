"""Dense complex linear algebra for small systems: Kronecker products, state validation,
seeded Haar unitaries and Hilbert–Schmidt random states.

All randomness goes through `make_rng(seed, *stream)`; there is no module-level RNG.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from entrosteer.errors import DimensionMismatch, NotHermitian, NotPositive, NotUnitary, TraceNotOne

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_FLOOR = -1e-9
UNITARY_TOL = 1e-10
MAX_DIM = 64          # three qubits or 4⊗4 composites; single parties stay at d ≤ 16

Seed = Union[int, np.random.Generator]


# ─── Randomness ───────────────────────────────────────────────────────────────

def make_rng(seed: Seed, *stream: int) -> np.random.Generator:
    """
    Derive a generator from a 64-bit seed and optional stream indices.
    make_rng(s, k) is the k-th independent shard of seed s; identical inputs give
    bit-identical streams.
    """
    if isinstance(seed, np.random.Generator):
        if stream:
            return np.random.default_rng(seed.integers(0, 2**63, size=len(stream) + 1).tolist())
        return seed
    if not 0 <= int(seed) < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.default_rng([int(seed), *[int(s) for s in stream]])


# ─── Matrix helpers ───────────────────────────────────────────────────────────

def as_matrix(m) -> np.ndarray:
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionMismatch("matrix has non-finite entries")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product: (a⊗b)[i·db+k, j·db+l] = a[i,j]·b[k,l]."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(mats: Iterable[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, [as_matrix(m) for m in mats])


def projector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    return np.outer(v, np.conj(v))


def unitarity_deviation(u: np.ndarray) -> float:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        return float("inf")
    return float(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0]))))


def check_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    u = as_matrix(u)
    dev = unitarity_deviation(u)
    if dev > tol:
        raise NotUnitary(f"matrix is not unitary (max |U†U − I| = {dev:.3e})", deviation=dev)
    return u


# ─── Density matrices ─────────────────────────────────────────────────────────

@dataclass(frozen=True)
class DensityMatrix:
    """Validated d×d state. Construct through validate_density()."""

    matrix: np.ndarray

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def expectation(self, op: np.ndarray) -> complex:
        return complex(np.trace(self.matrix @ as_matrix(op)))

    def conjugate_by(self, u: np.ndarray) -> "DensityMatrix":
        """UρU† for a unitary U of matching dimension."""
        u = check_unitary(u)
        if u.shape != self.matrix.shape:
            raise DimensionMismatch(f"unitary {u.shape} does not act on a {self.dim}-dim state")
        return validate_density(u @ self.matrix @ dagger(u))

    def distance(self, other: "DensityMatrix") -> float:
        """Largest absolute entry of the difference."""
        return float(np.max(np.abs(self.matrix - other.matrix)))


def validate_density(m) -> DensityMatrix:
    """
    Check Hermiticity, unit trace and positivity (eigenvalue floor −1e-9).
    Each failure raises with the size of the violation.
    """
    arr = as_matrix(m)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"density matrix must be square, got {arr.shape}")
    if arr.shape[0] > MAX_DIM:
        raise DimensionMismatch(f"dimension {arr.shape[0]} exceeds supported maximum {MAX_DIM}")

    herm_dev = float(np.max(np.abs(arr - dagger(arr))))
    if herm_dev > HERMITIAN_TOL:
        raise NotHermitian(f"matrix is not Hermitian (max |M − M†| = {herm_dev:.3e})", herm_dev)

    arr = 0.5 * (arr + dagger(arr))
    trace_dev = abs(float(np.real(np.trace(arr))) - 1.0)
    if trace_dev > TRACE_TOL:
        raise TraceNotOne(f"trace differs from 1 by {trace_dev:.3e}", trace_dev)

    min_eig = float(np.min(np.linalg.eigvalsh(arr)))
    if min_eig < POSITIVITY_FLOOR:
        raise NotPositive(f"minimum eigenvalue {min_eig:.3e} is negative", -min_eig)

    return DensityMatrix(arr.copy())


def maximally_mixed(d: int) -> DensityMatrix:
    return DensityMatrix(np.eye(d, dtype=np.complex128) / d)


def pure_state(v: Sequence[complex]) -> DensityMatrix:
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    v = v / np.linalg.norm(v)
    return validate_density(projector(v))


# ─── Random ensembles ─────────────────────────────────────────────────────────

def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_unitary(d: int, seed: Seed) -> np.ndarray:
    """Haar-distributed U(d) via QR of a Ginibre matrix with the R-diagonal phase fix."""
    if d < 2:
        raise ValueError("random_unitary needs d >= 2")
    rng = make_rng(seed)
    q, r = np.linalg.qr(_ginibre(rng, d, d))
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases[np.newaxis, :]


def random_density_hs(d: int, seed: Seed) -> DensityMatrix:
    """Hilbert–Schmidt ensemble: ρ = GG†/Tr(GG†) with G a d×d Ginibre matrix."""
    if d < 2:
        raise ValueError("random_density_hs needs d >= 2")
    rng = make_rng(seed)
    g = _ginibre(rng, d, d)
    rho = g @ dagger(g)
    return validate_density(rho / np.real(np.trace(rho)))


def random_density_hs_batch(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n HS samples stacked as an (n, d, d) array; skips per-sample validation."""
    g = (rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))) / np.sqrt(2)
    rho = g @ np.conj(np.transpose(g, (0, 2, 1)))
    traces = np.real(np.trace(rho, axis1=1, axis2=2))
    return rho / traces[:, np.newaxis, np.newaxis]


def random_pure_vector(d: int, rng: np.random.Generator) -> np.ndarray:
    v = _ginibre(rng, d, 1).reshape(-1)
    return v / np.linalg.norm(v)


def bronzan_unitary(angles: Sequence[float], phases: Sequence[float]) -> np.ndarray:
    """
    Bronzan parametrisation of SU(3): three angles θ1..θ3 ∈ [0, π/2] and five
    phases φ1..φ5. Covers SU(3) up to the measure-zero boundary.
    """
    t1, t2, t3 = angles
    p1, p2, p3, p4, p5 = phases
    s1, s2, s3 = np.sin([t1, t2, t3])
    c1, c2, c3 = np.cos([t1, t2, t3])
    e = lambda x: np.exp(1j * x)  # noqa: E731

    return np.array([
        [c1 * c2 * e(p1), s1 * e(p3), c1 * s2 * e(p4)],
        [s2 * s3 * e(-p4 - p5) - s1 * c2 * c3 * e(p1 + p2 - p3),
         c1 * c3 * e(p2),
         -c2 * s3 * e(-p1 - p5) - s1 * s2 * c3 * e(p2 - p3 + p4)],
        [-s1 * c2 * s3 * e(p1 - p3 + p5) - s2 * c3 * e(-p2 - p4),
         c1 * s3 * e(p5),
         c2 * c3 * e(-p1 - p2) - s1 * s2 * s3 * e(-p3 + p4 + p5)],
    ], dtype=np.complex128)


def random_bronzan_parameters(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    return rng.uniform(0, np.pi / 2, size=3), rng.uniform(0, 2 * np.pi, size=5)


# ─── JSON interchange ─────────────────────────────────────────────────────────

def matrix_to_json(m: np.ndarray) -> dict:
    m = as_matrix(m)
    return {"dim": int(m.shape[0]), "re": np.real(m).tolist(), "im": np.imag(m).tolist()}


def matrix_from_json(payload: dict) -> np.ndarray:
    try:
        re = np.asarray(payload["re"], dtype=float)
        im = np.asarray(payload["im"], dtype=float)
        dim = int(payload["dim"])
    except (KeyError, TypeError, ValueError) as e:
        raise DimensionMismatch(f"malformed matrix JSON: {e}") from e
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise DimensionMismatch(f"matrix JSON declares dim {dim} but holds {re.shape}/{im.shape}")
    return re + 1j * im


def load_density(path: Union[str, Path]) -> DensityMatrix:
    """Read the {"dim", "re", "im"} format and verify every density invariant."""
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return validate_density(matrix_from_json(payload))


def dump_density(rho: DensityMatrix, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(rho.matrix)), encoding="utf-8")
