import numpy as np
import pytest

from entrosteer.errors import DomainError, InfiniteDivergence, InvalidDistribution, MarginalMismatch
from entrosteer.services.entropy import (
    EntropyKind,
    ProbDist,
    conditional_shannon,
    conditional_tsallis,
    correction_a_to_bc,
    correction_ab_to_c,
    correction_bipartite,
    correction_term,
    entropy,
    marginal,
    min_entropy,
    q_log,
    relative_entropy,
    renyi,
    shannon,
    tsallis,
)

LN2 = np.log(2)
JOINT = np.array([[0.30, 0.10, 0.05], [0.05, 0.25, 0.25]])


def test_prob_dist_clamps_tiny_negatives():
    p = ProbDist.of([0.5, 0.5 + 1e-13, -1e-13])
    assert p.flat.min() == 0.0
    assert p.flat.sum() == pytest.approx(1.0)


@pytest.mark.parametrize("values", [[0.5, 0.6], [1.2, -0.2], [], [np.nan, 1.0]])
def test_prob_dist_rejects_invalid(values):
    with pytest.raises(InvalidDistribution):
        ProbDist.of(values)


def test_entropy_kind_needs_positive_parameter():
    with pytest.raises(DomainError):
        EntropyKind.tsallis(0)
    assert EntropyKind.tsallis(1 + 1e-12).is_shannon
    assert EntropyKind.renyi(2).label == "renyi(r=2)"


def test_q_log():
    assert q_log(1.0, 2.5) == 0.0
    assert q_log(2.0, 2.0) == pytest.approx(0.5)
    assert q_log(2.0, 1.0) == pytest.approx(LN2)
    with pytest.raises(DomainError):
        q_log(0.0, 2.0)


def test_known_values():
    assert shannon([0.25] * 4) == pytest.approx(2 * LN2)
    assert tsallis([0.5, 0.5], 2) == pytest.approx(0.5)
    assert renyi([0.5, 0.5], 2) == pytest.approx(LN2)
    assert min_entropy([0.5, 0.25, 0.25]) == pytest.approx(LN2)


def test_shannon_limit_is_continuous():
    p = [0.7, 0.2, 0.1]
    assert tsallis(p, 1 + 1e-6) == pytest.approx(shannon(p), abs=1e-5)
    assert renyi(p, 1 - 1e-6) == pytest.approx(shannon(p), abs=1e-5)


def test_entropies_decrease_with_parameter():
    p = [0.6, 0.3, 0.1]
    grid = [0.5, 0.9, 1.5, 2, 3, 5]
    ts = [tsallis(p, q) for q in grid]
    rs = [renyi(p, r) for r in grid]
    assert all(a > b for a, b in zip(ts, ts[1:]))
    assert all(a > b for a, b in zip(rs, rs[1:]))


def test_large_renyi_approaches_min_entropy():
    p = [0.6, 0.3, 0.1]
    assert renyi(p, 2000) == pytest.approx(min_entropy(p), rel=1e-3)


@pytest.mark.parametrize("q", [0.5, 2.0, 3.5])
def test_tsallis_pseudo_additivity(q):
    pa = np.array([0.7, 0.3])
    pb = np.array([0.2, 0.5, 0.3])
    sa, sb = tsallis(pa, q), tsallis(pb, q)
    assert tsallis(np.outer(pa, pb), q) == pytest.approx(sa + sb + (1 - q) * sa * sb)


@pytest.mark.parametrize("r", [0.5, 2.0, 4.0])
def test_renyi_from_tsallis(r):
    p = [0.5, 0.3, 0.2]
    assert renyi(p, r) == pytest.approx(np.log(1 + (1 - r) * tsallis(p, r)) / (1 - r))


def test_entropy_dispatch():
    p = [0.5, 0.5]
    assert entropy(p, EntropyKind.shannon()) == pytest.approx(LN2)
    assert entropy(p, EntropyKind.tsallis(2)) == pytest.approx(0.5)
    assert entropy(p, EntropyKind.renyi(2)) == pytest.approx(LN2)


def test_marginal():
    np.testing.assert_allclose(marginal(JOINT, keep=[0]).probs, [0.45, 0.55])
    np.testing.assert_allclose(marginal(JOINT, keep=[1]).probs, [0.35, 0.35, 0.30])


def test_conditional_entropies():
    expected = shannon(JOINT) - shannon(JOINT.sum(axis=1))
    assert conditional_shannon(JOINT) == pytest.approx(expected)
    assert conditional_tsallis(JOINT, None, 1.0) == pytest.approx(expected)
    assert conditional_tsallis(JOINT, JOINT.sum(axis=1), 2.0) == pytest.approx(
        tsallis(JOINT, 2) - tsallis(JOINT.sum(axis=1), 2))


def test_conditional_rejects_inconsistent_marginal():
    with pytest.raises(MarginalMismatch):
        conditional_tsallis(JOINT, [0.5, 0.5], 2.0)


@pytest.mark.parametrize("q", [0.7, 2.0, 3.0])
def test_corrected_conditional_matches_probability_form(q):
    p_i = JOINT.sum(axis=1)
    prob_form = (1 - np.sum(JOINT ** q * p_i[:, None] ** (1 - q))) / (q - 1)
    corrected = conditional_tsallis(JOINT, None, q) + (1 - q) * correction_bipartite(JOINT, q)
    assert corrected == pytest.approx(prob_form)


def test_correction_vanishes_only_in_shannon_limit():
    assert correction_term(JOINT, 1.0) == 0.0
    pa = np.array([0.4, 0.6])
    product = np.outer(pa, [0.5, 0.5])
    assert correction_term(product, 2.0) != 0.0


def test_tripartite_corrections_regroup_axes():
    rng = np.random.default_rng(0)
    grid = rng.random((2, 2, 2))
    grid /= grid.sum()
    assert correction_a_to_bc(grid, 2.0) == pytest.approx(correction_term(grid.reshape(2, 4), 2.0))
    assert correction_ab_to_c(grid, 2.0) == pytest.approx(correction_term(grid.reshape(4, 2), 2.0))


def test_relative_entropy_values():
    p = [0.5, 0.5]
    assert relative_entropy(p, p, EntropyKind.shannon()) == pytest.approx(0.0)
    assert relative_entropy([1, 0], [0.5, 0.5], EntropyKind.shannon()) == pytest.approx(LN2)
    assert relative_entropy([1, 0], [0.5, 0.5], EntropyKind.tsallis(2)) == pytest.approx(1.0)


def test_relative_entropy_support_mismatch():
    with pytest.raises(InfiniteDivergence) as exc:
        relative_entropy([0.5, 0.5], [1.0, 0.0], EntropyKind.shannon())
    assert exc.value.offending == [1]
    # below q = 1 the divergence stays finite
    value = relative_entropy([0.5, 0.5], [1.0, 0.0], EntropyKind.tsallis(0.5))
    assert np.isfinite(value)
