import numpy as np
import pytest

from entrosteer.errors import DimensionMismatch, OutOfRange, SingularMarginal
from entrosteer.services.quantum_core import random_density_hs, validate_density
from entrosteer.services.states import (
    BlochParams,
    StateFamily,
    bes_admissible,
    bound_entangled,
    check_marginal_regular,
    example_states,
    extract_bloch,
    isotropic,
    min_ppt_eigenvalue,
    noisy_family,
    noisy_ghz,
    noisy_w,
    one_way,
    partial_trace,
    partial_transpose,
    product_state,
    singlet,
    swap_parties,
    two_qubit_bloch,
    two_qutrit,
    w_vector,
    werner,
)


def test_partial_trace_of_product():
    a = random_density_hs(2, seed=1)
    b = random_density_hs(3, seed=2)
    rho = product_state(a, b)
    np.testing.assert_allclose(partial_trace(rho, (2, 3), keep=[0]), a.matrix, atol=1e-12)
    np.testing.assert_allclose(partial_trace(rho, (2, 3), keep=[1]), b.matrix, atol=1e-12)


def test_partial_trace_checks_dims():
    with pytest.raises(DimensionMismatch):
        partial_trace(np.eye(4) / 4, (2, 3), keep=[0])


def test_singlet_is_npt():
    assert min_ppt_eigenvalue(singlet(), (2, 2)) == pytest.approx(-0.5)
    pt = partial_transpose(singlet(), (2, 2), system=1)
    assert np.trace(pt).real == pytest.approx(1.0)


def test_werner_bloch_parameters():
    params = extract_bloch(werner(0.6))
    np.testing.assert_allclose(params.a, 0, atol=1e-12)
    np.testing.assert_allclose(params.b, 0, atol=1e-12)
    np.testing.assert_allclose(params.c, [-0.6, -0.6, -0.6], atol=1e-12)
    assert werner(1.0).distance(singlet()) < 1e-12


def test_bloch_round_trip():
    p = BlochParams.of(a=(0.1, 0.0, 0.2), b=(0.0, -0.1, 0.1), c=(-0.2, 0.1, -0.2))
    back = extract_bloch(two_qubit_bloch(p))
    np.testing.assert_allclose(back.a, p.a, atol=1e-12)
    np.testing.assert_allclose(back.c, p.c, atol=1e-12)


def test_werner_range():
    with pytest.raises(OutOfRange):
        werner(1.2)


def test_isotropic():
    rho = isotropic(3, 0.5)
    assert np.trace(rho.matrix).real == pytest.approx(1.0)
    isotropic(3, -1 / 8)
    with pytest.raises(OutOfRange) as exc:
        isotropic(3, 1.5)
    assert exc.value.name == "alpha"


def test_example_states_are_close_to_printed():
    ex2, ex3 = example_states()
    assert ex2.dim == ex3.dim == 4
    assert ex2.matrix[1, 2].real == pytest.approx(-0.43, abs=0.02)
    assert ex3.matrix[2, 2].real == pytest.approx(0.49, abs=0.02)


def test_noisy_family_mixes_with_identity():
    ex2, _ = example_states()
    assert noisy_family(ex2, 0.0).distance(validate_density(np.eye(4) / 4)) < 1e-12
    with pytest.raises(OutOfRange):
        noisy_family(ex2, 1.1)


def test_two_qutrit():
    assert two_qutrit(1.0).purity == pytest.approx(1.0)
    with pytest.raises(OutOfRange):
        two_qutrit(-0.1)


@pytest.mark.parametrize("beta", [0.0, 0.4, 1.0])
def test_one_way_keeps_bob_marginal(beta):
    theta = np.pi / 8
    rho_b = partial_trace(one_way(beta, theta), (2, 2), keep=[1])
    np.testing.assert_allclose(np.diag(rho_b).real, [np.cos(theta) ** 2, np.sin(theta) ** 2], atol=1e-12)


def test_one_way_theta_range():
    with pytest.raises(OutOfRange):
        one_way(0.5, 1.0)


def test_swap_parties_is_an_involution():
    rho = random_density_hs(6, seed=4)
    swapped = swap_parties(rho, (2, 3))
    assert swap_parties(swapped, (3, 2)).distance(rho) < 1e-12
    np.testing.assert_allclose(partial_trace(swapped, (3, 2), keep=[0]),
                               partial_trace(rho, (2, 3), keep=[1]), atol=1e-12)


@pytest.mark.parametrize("m1,m2", [(0.1, 0.2), (0.3, 0.5), (0.0, 0.9), (0.57, 0.57)])
def test_bound_entangled_family_is_ppt(m1, m2):
    assert bes_admissible(m1, m2)
    assert min_ppt_eigenvalue(bound_entangled(m1, m2), (3, 3)) >= -1e-9


def test_bound_entangled_rejects_inadmissible_point():
    assert not bes_admissible(0.8, 0.8)
    with pytest.raises(OutOfRange):
        bound_entangled(0.8, 0.8)


def test_three_qubit_families():
    assert np.linalg.norm(w_vector()) == pytest.approx(1.0)
    assert noisy_ghz(1.0).purity == pytest.approx(1.0)
    assert noisy_w(0.0).purity == pytest.approx(1 / 8)


def test_state_family_is_callable():
    family = StateFamily("werner", "w", werner, (2, 2))
    assert family(0.5).distance(werner(0.5)) == 0.0


def test_singular_marginal_detection():
    check_marginal_regular(np.array([0.5, 0.0, 0.2]))
    with pytest.raises(SingularMarginal):
        check_marginal_regular(np.array([1.0, 0.0, 0.0]))
