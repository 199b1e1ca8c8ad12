"""
Measurement bases: Pauli eigenbases, Fourier and complete MUB sets, the explicit
dimension-4 MUB set, the rotated qutrit pair used for the bound-entangled family, and
unitary rotations.

A basis is stored as a unitary matrix whose column k is the eigenvector for outcome k,
each column in the gauge where its first nonzero component is real and positive.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from entrosteer.errors import DimensionMismatch, NotPrime, NotUnitary
from entrosteer.services.quantum_core import as_matrix, check_unitary, dagger, unitarity_deviation

ORTHONORMAL_TOL = 1e-10
UNBIASED_TOL = 1e-9
_GAUGE_EPS = 1e-12

_SQ2 = np.sqrt(2.0)


def canonical_gauge(vectors: np.ndarray) -> np.ndarray:
    """Rephase each column so its first component with modulus > 1e-12 is real positive."""
    out = np.array(vectors, dtype=np.complex128)
    for k in range(out.shape[1]):
        col = out[:, k]
        lead = np.flatnonzero(np.abs(col) > _GAUGE_EPS)
        if lead.size:
            z = col[lead[0]]
            out[:, k] = col * (np.conj(z) / abs(z))
    return out


# ─── Domain types ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class MeasurementBasis:
    vectors: np.ndarray                 # d×d, column k ↔ outcome k
    values: np.ndarray                  # outcome eigenvalues (±1 for Pauli), used to merge global outcomes
    name: str = ""

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def projectors(self) -> np.ndarray:
        """(d, d, d) stack: projectors[k] = |v_k⟩⟨v_k|."""
        v = self.vectors
        return np.einsum("ik,jk->kij", v, np.conj(v))

    @property
    def observable(self) -> np.ndarray:
        return self.vectors @ np.diag(self.values.astype(np.complex128)) @ dagger(self.vectors)

    def overlaps(self, other: "MeasurementBasis") -> np.ndarray:
        """|⟨v_i|w_j⟩|² for all outcome pairs."""
        return np.abs(dagger(self.vectors) @ other.vectors) ** 2

    def probabilities(self, rho: np.ndarray) -> np.ndarray:
        """Born rule outcome distribution for a single-party state."""
        v = self.vectors
        return np.real(np.einsum("ik,ij,jk->k", np.conj(v), rho, v))


def make_basis(vectors, values: Optional[Sequence[float]] = None, name: str = "") -> MeasurementBasis:
    """Validate orthonormality of the columns and fix the phase gauge."""
    v = as_matrix(vectors)
    if v.shape[0] != v.shape[1]:
        raise DimensionMismatch(f"a basis of C^{v.shape[0]} needs {v.shape[0]} vectors, got {v.shape[1]}")
    dev = unitarity_deviation(v)
    if dev > ORTHONORMAL_TOL:
        raise NotUnitary(f"basis {name or '?'} is not orthonormal (deviation {dev:.3e})", deviation=dev)
    vals = np.arange(v.shape[0], dtype=float) if values is None else np.asarray(values, dtype=float)
    if vals.shape != (v.shape[0],):
        raise DimensionMismatch(f"need {v.shape[0]} outcome values, got {vals.shape}")
    v = canonical_gauge(v)
    v.setflags(write=False)
    vals.setflags(write=False)
    return MeasurementBasis(v, vals, name)


@dataclass(frozen=True)
class MeasurementSet:
    bases: tuple[MeasurementBasis, ...]
    unbiased: bool = field(init=False)

    def __post_init__(self):
        if not self.bases:
            raise DimensionMismatch("a measurement set needs at least one basis")
        dims = {b.dim for b in self.bases}
        if len(dims) != 1:
            raise DimensionMismatch(f"bases in one set must share a dimension, got {sorted(dims)}")
        object.__setattr__(self, "unbiased", _pairwise_unbiased(self.bases))

    @property
    def dim(self) -> int:
        return self.bases[0].dim

    @property
    def names(self) -> list[str]:
        return [b.name for b in self.bases]

    def __len__(self) -> int:
        return len(self.bases)

    def __getitem__(self, idx) -> MeasurementBasis:
        return self.bases[idx]

    def __iter__(self):
        return iter(self.bases)

    def select(self, indices: Iterable[int]) -> "MeasurementSet":
        return MeasurementSet(tuple(self.bases[i] for i in indices))


def measurement_set(bases: Iterable[MeasurementBasis]) -> MeasurementSet:
    return MeasurementSet(tuple(bases))


def _pairwise_unbiased(bases: Sequence[MeasurementBasis]) -> bool:
    d = bases[0].dim
    for i in range(len(bases)):
        for j in range(i + 1, len(bases)):
            if np.max(np.abs(bases[i].overlaps(bases[j]) - 1.0 / d)) > UNBIASED_TOL:
                return False
    return True


# ─── Pauli ────────────────────────────────────────────────────────────────────

_PAULI_VECTORS = {
    "x": np.array([[1, 1], [1, -1]], dtype=np.complex128) / _SQ2,
    "y": np.array([[1, 1], [1j, -1j]], dtype=np.complex128) / _SQ2,
    "z": np.eye(2, dtype=np.complex128),
}

PAULI_MATRICES = {
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def pauli_basis(axis: str) -> MeasurementBasis:
    """Eigenbasis of σ_axis, +1 eigenvector first."""
    axis = axis.lower()
    if axis not in _PAULI_VECTORS:
        raise DimensionMismatch(f"unknown Pauli axis {axis!r}")
    return make_basis(_PAULI_VECTORS[axis], values=(1.0, -1.0), name=f"sigma_{axis}")


def pauli_set(axes: Union[str, Sequence[str]]) -> MeasurementSet:
    """pauli_set("xz") or pauli_set(["x", "y", "z"]); repeats are allowed."""
    axes = list(axes)
    if not axes:
        raise DimensionMismatch("pauli_set needs at least one axis")
    return measurement_set(pauli_basis(a) for a in axes)


# ─── MUB constructions ────────────────────────────────────────────────────────

def computational_basis(d: int) -> MeasurementBasis:
    return make_basis(np.eye(d), name="computational")


def fourier_basis(d: int) -> MeasurementBasis:
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return make_basis(np.exp(2j * np.pi * j * k / d) / np.sqrt(d), name="fourier")


def mub_fourier_pair(d: int) -> MeasurementSet:
    if d < 2:
        raise DimensionMismatch("mub_fourier_pair needs d >= 2")
    return measurement_set([computational_basis(d), fourier_basis(d)])


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % k for k in range(2, int(np.sqrt(n)) + 1))


def mub_complete(d: int) -> MeasurementSet:
    """
    d + 1 MUBs for prime d: the computational basis plus, for t = 0..d−1, the basis with
    vectors e^{2πi(t·j² + s·j)/d}/√d. For d = 2 the quadratic phase degenerates, so the
    Pauli z, x, y eigenbases are returned.
    """
    if not is_prime(d):
        raise NotPrime(f"complete MUB construction implemented for prime d only, got {d}")
    if d == 2:
        return pauli_set("zxy")

    bases = [computational_basis(d)]
    j = np.arange(d)[:, np.newaxis]
    s = np.arange(d)[np.newaxis, :]
    for t in range(d):
        phase = np.exp(2j * np.pi * ((t * j * j + s * j) % d) / d) / np.sqrt(d)
        bases.append(make_basis(phase, name=f"wh_{t}"))
    return measurement_set(bases)


_DIM4 = [
    np.eye(4),
    np.array([[1, 1, 1, 1],
              [1, 1, -1, -1],
              [1, -1, -1, 1],
              [1, -1, 1, -1]]) / 2,
    np.array([[1, 1, 1, 1],
              [-1, -1, 1, 1],
              [-1j, 1j, 1j, -1j],
              [-1j, 1j, -1j, 1j]]) / 2,
    np.array([[1, 1, 1, 1],
              [-1j, -1j, 1j, 1j],
              [-1j, 1j, 1j, -1j],
              [-1, 1, -1, 1]]) / 2,
    np.array([[1, 1, 1, 1],
              [-1j, -1j, 1j, 1j],
              [-1, 1, -1, 1],
              [-1j, 1j, 1j, -1j]]) / 2,
]


def mub_dim4() -> MeasurementSet:
    """Five MUBs in C^4 as explicit matrices M1..M5, columns as basis vectors."""
    return measurement_set(make_basis(m, name=f"M{k + 1}") for k, m in enumerate(_DIM4))


def bes_measurements(phase: complex = 1.0) -> MeasurementSet:
    """
    Rotated qutrit pair adapted to the bound-entangled family's symmetry. Rows below are
    the basis vectors. `phase` is the unimodular factor on the last two vectors of the
    second basis; any |phase| = 1 keeps the pair unbiased.
    """
    if abs(abs(phase) - 1.0) > 1e-12:
        raise DimensionMismatch(f"phase must be unimodular, got |phase| = {abs(phase)}")
    first = np.array([
        [1 / np.sqrt(3), -1 / np.sqrt(6), -1 / _SQ2],
        [1 / np.sqrt(3), -1 / np.sqrt(6), 1 / _SQ2],
        [1 / np.sqrt(3), np.sqrt(2 / 3), 0.0],
    ], dtype=np.complex128)
    p = complex(phase)
    second = np.array([
        [1, 0, 0],
        [0, p / _SQ2, 1j * p / _SQ2],
        [0, np.conj(p) / _SQ2, -1j * np.conj(p) / _SQ2],
    ], dtype=np.complex128)
    return measurement_set([make_basis(first.T, name="bes_1"), make_basis(second.T, name="bes_2")])


# ─── Transformations ──────────────────────────────────────────────────────────

def rotate(mset: MeasurementSet, unitaries) -> MeasurementSet:
    """
    v ↦ Uv for every vector. `unitaries` is a single matrix (shared), a one-element list
    (shared), or one matrix per basis.
    """
    if isinstance(unitaries, np.ndarray) and unitaries.ndim == 2:
        unitaries = [unitaries]
    unitaries = [check_unitary(u) for u in unitaries]
    if len(unitaries) == 1:
        unitaries = unitaries * len(mset)
    if len(unitaries) != len(mset):
        raise DimensionMismatch(f"{len(unitaries)} unitaries for {len(mset)} bases")

    rotated = []
    for basis, u in zip(mset, unitaries):
        if u.shape != (basis.dim, basis.dim):
            raise DimensionMismatch(f"unitary {u.shape} does not act on C^{basis.dim}")
        rotated.append(make_basis(u @ basis.vectors, values=basis.values, name=basis.name))
    return measurement_set(rotated)


def conjugate(mset: MeasurementSet) -> MeasurementSet:
    """Complex-conjugate every vector (Bob's bases for isotropic states)."""
    return measurement_set(make_basis(np.conj(b.vectors), values=b.values, name=f"{b.name}*") for b in mset)


# ─── JSON interchange ─────────────────────────────────────────────────────────

def set_to_json(mset: MeasurementSet) -> dict:
    return {"bases": [
        {"name": b.name, "dim": b.dim, "re": np.real(b.vectors).tolist(),
         "im": np.imag(b.vectors).tolist(), "values": b.values.tolist()}
        for b in mset
    ]}


def set_from_json(payload: dict) -> MeasurementSet:
    bases = []
    for entry in payload["bases"]:
        dim = int(entry["dim"])
        m = np.asarray(entry["re"], dtype=float) + 1j * np.asarray(entry["im"], dtype=float)
        if m.shape != (dim, dim):
            raise DimensionMismatch(f"basis {entry.get('name')} declares dim {dim} but holds {m.shape}")
        bases.append(make_basis(m, values=entry.get("values"), name=entry.get("name", "")))
    return measurement_set(bases)


def load_measurement_set(path: Union[str, Path]) -> MeasurementSet:
    return set_from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def dump_measurement_set(mset: MeasurementSet, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(set_to_json(mset), indent=2), encoding="utf-8")
