import numpy as np
import pytest

from entrosteer.errors import OutOfRange
from entrosteer.services.criteria import DEFAULT_TOL, closed_form_two_qubit_q2, guhne_global, linear_criterion
from entrosteer.services.entropy import EntropyKind
from entrosteer.services.eur_bounds import bound_tsallis_mub
from entrosteer.services.presets import bipartite_scenario
from entrosteer.services.quantum_core import make_rng, random_density_hs_batch
from entrosteer.services.states import BlochParams, correlation_matrix, local_vectors, two_qubit_bloch
from entrosteer.services.survey import (
    bloch_batch,
    criteria_violations,
    normal_form,
    survey_random,
    wilson_interval,
)


def test_bloch_batch_matches_single_state_helpers():
    rhos = random_density_hs_batch(4, 5, make_rng(3))
    a, b, t = bloch_batch(rhos)
    for k, rho in enumerate(rhos):
        a_k, b_k = local_vectors(rho)
        np.testing.assert_allclose(a[k], a_k, atol=1e-12)
        np.testing.assert_allclose(b[k], b_k, atol=1e-12)
        np.testing.assert_allclose(t[k], correlation_matrix(rho), atol=1e-12)


def test_normal_form_diagonalises_and_keeps_determinant():
    rhos = random_density_hs_batch(4, 20, make_rng(4))
    a, b, t = bloch_batch(rhos)
    a2, b2, c = normal_form(a, b, t)
    np.testing.assert_allclose(np.prod(c, axis=1), np.linalg.det(t), atol=1e-12)
    np.testing.assert_allclose(np.sort(np.abs(c), axis=1), np.sort(np.linalg.svd(t, compute_uv=False), axis=1),
                               atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(a2, axis=1), np.linalg.norm(a, axis=1), atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(b2, axis=1), np.linalg.norm(b, axis=1), atol=1e-12)


def test_criteria_violations_on_werner_data():
    zeros = np.zeros((2, 3))
    c = np.array([[-0.6, -0.6, -0.6], [-0.5, -0.5, -0.5]])
    masks = criteria_violations(zeros, zeros, c, 1e-9)
    np.testing.assert_array_equal(masks["general"], [True, False])
    np.testing.assert_array_equal(masks["guhne"], [True, False])
    np.testing.assert_array_equal(masks["linear"], [True, False])


def test_wilson_interval():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0
    assert 0.03 < hi < 0.05
    lo, hi = wilson_interval(50, 100)
    assert 0.5 - lo == pytest.approx(hi - 0.5)


@pytest.mark.parametrize("n", [1, 7, 100, 100000])
def test_wilson_interval_edges_are_exact(n):
    assert wilson_interval(0, n)[0] == 0.0
    assert wilson_interval(n, n)[1] == 1.0
    lo, hi = wilson_interval(n, n)
    assert 1 - lo == pytest.approx(wilson_interval(0, n)[1])


def test_survey_counts_are_consistent():
    table = survey_random(2000, seed=0, batch_size=500)
    counts = {r.category: r.count for r in table.rows}
    for k in ("general", "guhne", "linear"):
        assert counts[f"only-{k}"] <= counts[k]
        assert counts["all"] <= counts[k]
    assert counts["linear-without-general"] == 0
    assert counts["none"] + counts["general"] <= 2000 + counts["all"] + counts["only-general"]
    assert table.row("none").ci_low <= table.row("none").fraction <= table.row("none").ci_high


def test_survey_is_reproducible_and_thread_independent():
    first = survey_random(1500, seed=9, batch_size=400)
    again = survey_random(1500, seed=9, batch_size=400, threads=3)
    other = survey_random(1500, seed=10, batch_size=400)
    assert first.model_dump() == again.model_dump()
    assert first.model_dump() != other.model_dump()


def test_survey_subset_of_criteria():
    table = survey_random(300, seed=1, criteria=["guhne"])
    categories = {r.category for r in table.rows}
    assert "general" not in categories
    assert "linear-without-general" not in categories
    assert table.row("only-guhne").count == table.row("guhne").count


def test_survey_rejects_bad_input():
    with pytest.raises(OutOfRange):
        survey_random(0)
    with pytest.raises(OutOfRange):
        survey_random(10, criteria=["huang"])


@pytest.mark.slow
def test_survey_reference_fractions():
    table = survey_random(100_000, seed=0)
    assert table.row("none").fraction == pytest.approx(0.9434, abs=0.005)
    assert table.row("all").fraction == pytest.approx(0.0381, abs=0.003)
    assert table.row("only-general").fraction == pytest.approx(0.0185, abs=0.002)
    assert table.row("linear-without-general").count == 0


def test_violation_masks_agree_with_single_state_criteria():
    rhos = random_density_hs_batch(4, 300, make_rng(11))
    a, b, c = normal_form(*bloch_batch(rhos))
    masks = criteria_violations(a, b, c, DEFAULT_TOL)
    pauli3 = bipartite_scenario("pauli3", (2, 2))
    kind = EntropyKind.tsallis(2)
    bound = bound_tsallis_mub(2, 3, 2.0)
    for k in range(len(rhos)):
        params = BlochParams.of(a[k], b[k], c[k])
        general = closed_form_two_qubit_q2(params)
        guhne = guhne_global(two_qubit_bloch(params), pauli3, kind, bound)
        linear = linear_criterion(c[k])
        # verdicts right on the boundary may flip under rounding
        if abs(general.lhs - bound.value) > 1e-6:
            assert masks["general"][k] == general.violated
        if abs(guhne.lhs - bound.value) > 1e-6:
            assert masks["guhne"][k] == guhne.violated
            assert masks["linear"][k] == linear.violated
