import numpy as np
import pytest

from entrosteer.errors import DimensionMismatch, NotHermitian, NotPositive, TraceNotOne
from entrosteer.services.quantum_core import (
    bronzan_unitary,
    dump_density,
    kron,
    load_density,
    make_rng,
    maximally_mixed,
    random_bronzan_parameters,
    random_density_hs,
    random_density_hs_batch,
    random_unitary,
    unitarity_deviation,
    validate_density,
)


def test_validate_density_accepts_mixed_state():
    rho = validate_density(np.eye(3) / 3)
    assert rho.dim == 3
    assert rho.purity == pytest.approx(1 / 3)


def test_validate_density_rejects_non_hermitian():
    m = np.array([[0.5, 0.1], [0.0, 0.5]])
    with pytest.raises(NotHermitian) as exc:
        validate_density(m)
    assert exc.value.magnitude == pytest.approx(0.1)


def test_validate_density_rejects_wrong_trace():
    with pytest.raises(TraceNotOne):
        validate_density(np.eye(2))


def test_validate_density_rejects_negative_eigenvalue():
    with pytest.raises(NotPositive) as exc:
        validate_density(np.diag([1.2, -0.2]))
    assert exc.value.magnitude == pytest.approx(0.2)


def test_validate_density_rejects_non_square():
    with pytest.raises(DimensionMismatch):
        validate_density(np.ones((2, 3)) / 2)


def test_density_matrix_is_read_only():
    rho = maximally_mixed(2)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1.0


def test_kron_ordering():
    a = np.array([[1, 2], [3, 4]])
    b = np.array([[0, 1], [1, 0]])
    k = kron(a, b)
    assert k[0 * 2 + 1, 1 * 2 + 0] == a[0, 1] * b[1, 0]


def test_make_rng_streams_are_reproducible_and_distinct():
    a = make_rng(5, 1).standard_normal(4)
    b = make_rng(5, 1).standard_normal(4)
    c = make_rng(5, 2).standard_normal(4)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)


def test_make_rng_rejects_negative_seed():
    with pytest.raises(ValueError):
        make_rng(-1)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_random_unitary_is_unitary(d):
    assert unitarity_deviation(random_unitary(d, seed=11)) < 1e-12


def test_random_density_hs_is_seeded():
    a = random_density_hs(4, seed=3)
    b = random_density_hs(4, seed=3)
    c = random_density_hs(4, seed=4)
    assert a.distance(b) == 0.0
    assert a.distance(c) > 1e-6


def test_random_density_batch_is_valid():
    rhos = random_density_hs_batch(4, 50, make_rng(0))
    np.testing.assert_allclose(np.trace(rhos, axis1=1, axis2=2), 1.0, atol=1e-12)
    assert np.linalg.eigvalsh(rhos).min() > -1e-12


def test_bronzan_unitary_is_unitary():
    rng = make_rng(2)
    for _ in range(5):
        angles, phases = random_bronzan_parameters(rng)
        u = bronzan_unitary(angles, phases)
        assert unitarity_deviation(u) < 1e-12
        assert abs(np.linalg.det(u)) == pytest.approx(1.0)


def test_conjugation_preserves_spectrum():
    rho = random_density_hs(3, seed=8)
    u = random_unitary(3, seed=9)
    np.testing.assert_allclose(rho.conjugate_by(u).eigenvalues, rho.eigenvalues, atol=1e-12)


def test_density_file_round_trip(tmp_path):
    rho = random_density_hs(2, seed=1)
    path = tmp_path / "rho.json"
    dump_density(rho, path)
    assert load_density(path).distance(rho) < 1e-15


def test_load_density_reports_bad_shape(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"dim": 3, "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]}')
    with pytest.raises(DimensionMismatch):
        load_density(path)
