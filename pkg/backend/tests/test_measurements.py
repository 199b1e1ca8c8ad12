import numpy as np
import pytest

from entrosteer.errors import DimensionMismatch, NotPrime, NotUnitary
from entrosteer.services.measurements import (
    PAULI_MATRICES,
    bes_measurements,
    conjugate,
    dump_measurement_set,
    is_prime,
    load_measurement_set,
    make_basis,
    measurement_set,
    mub_complete,
    mub_dim4,
    mub_fourier_pair,
    pauli_set,
    rotate,
)
from entrosteer.services.quantum_core import random_density_hs, random_unitary


@pytest.mark.parametrize("axis", ["x", "y", "z"])
def test_pauli_observables(axis):
    (basis,) = pauli_set(axis)
    np.testing.assert_allclose(basis.observable, PAULI_MATRICES[axis], atol=1e-12)


def test_pauli_triple_is_unbiased_and_repeats_are_not():
    assert pauli_set("xyz").unbiased
    assert not pauli_set("xx").unbiased


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_complete_mubs_for_primes(d):
    mset = mub_complete(d)
    assert len(mset) == d + 1
    assert mset.dim == d
    assert mset.unbiased


def test_complete_mubs_need_prime_dimension():
    assert not is_prime(4)
    with pytest.raises(NotPrime):
        mub_complete(4)


def test_fourier_pair_any_dimension():
    assert mub_fourier_pair(6).unbiased


def test_dim4_set_is_unbiased_and_matches_fixture(fixtures_dir):
    built = mub_dim4()
    assert len(built) == 5
    assert built.unbiased
    loaded = load_measurement_set(fixtures_dir / "mub_dim4.json")
    for a, b in zip(built, loaded):
        np.testing.assert_allclose(a.vectors, b.vectors, atol=1e-12)


def test_bes_pair_matches_fixture(fixtures_dir):
    built = bes_measurements()
    assert built.unbiased
    loaded = load_measurement_set(fixtures_dir / "bes_bases.json")
    assert loaded.names == ["bes_1", "bes_2"]
    for a, b in zip(built, loaded):
        np.testing.assert_allclose(a.vectors, b.vectors, atol=1e-12)


def test_bes_pair_stays_unbiased_under_phase():
    assert bes_measurements(np.exp(0.3j)).unbiased
    with pytest.raises(DimensionMismatch):
        bes_measurements(0.5)


def test_make_basis_rejects_non_orthonormal():
    with pytest.raises(NotUnitary) as exc:
        make_basis([[1, 1], [0, 1]])
    assert exc.value.deviation > 0.1


def test_make_basis_fixes_phase_gauge():
    basis = make_basis(np.array([[-1, 0], [0, 1j]]))
    np.testing.assert_allclose(basis.vectors, np.eye(2), atol=1e-12)


def test_probabilities_sum_to_one():
    rho = random_density_hs(3, seed=5).matrix
    for basis in mub_complete(3):
        p = basis.probabilities(rho)
        assert p.sum() == pytest.approx(1.0)
        assert p.min() >= -1e-12


def test_rotation_keeps_unbiasedness():
    u = random_unitary(3, seed=1)
    assert rotate(mub_complete(3), u).unbiased
    with pytest.raises(DimensionMismatch):
        rotate(mub_complete(3), [u, u])


def test_conjugate_keeps_values_and_marks_names():
    conj = conjugate(pauli_set("xyz"))
    assert conj.names == ["sigma_x*", "sigma_y*", "sigma_z*"]
    np.testing.assert_array_equal(conj[1].values, [1.0, -1.0])
    # σ_y* = −σ_y
    np.testing.assert_allclose(conj[1].observable, -PAULI_MATRICES["y"], atol=1e-12)


def test_set_rejects_mixed_dimensions():
    with pytest.raises(DimensionMismatch):
        measurement_set([mub_complete(3)[0], mub_complete(2)[0]])


def test_measurement_set_file_round_trip(tmp_path):
    path = tmp_path / "set.json"
    dump_measurement_set(pauli_set("xz"), path)
    loaded = load_measurement_set(path)
    assert loaded.names == ["sigma_x", "sigma_z"]
    np.testing.assert_allclose(loaded[0].vectors, pauli_set("x")[0].vectors)
