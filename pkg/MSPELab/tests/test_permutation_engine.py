import math

import numpy as np
import pytest

from core.engines import permutation_engine as pe
from core.engines.permutation_engine import Permutation
from core.errors import ArgumentError, ResourceError


# ---------------------------------------------------------------------------
# Grupo simétrico
# ---------------------------------------------------------------------------

def test_permutation_basics():
    assert Permutation.identity(4).cycles == 4
    assert Permutation.transposition(4, 0, 1).cycle_type == "1+1+2"
    assert Permutation.cycle(4).cycles == 1
    assert Permutation.cycle(5, 3).cycle_lengths == (1, 1, 3)
    g = Permutation((1, 2, 0))
    assert g.compose(g.inverse()).is_identity()
    assert g.compose(Permutation((1, 0, 2))).image == (2, 1, 0)
    with pytest.raises(ArgumentError):
        Permutation((0, 0, 1))


def test_enumeration_is_lexicographic():
    elements = pe.enumerate_sym(3)
    assert len(elements) == 6
    assert elements[0].is_identity()
    assert [g.image for g in elements] == sorted(g.image for g in elements)


def test_vectorized_cycle_counts_match_elements():
    counts = pe.element_cycles(5)
    assert list(counts) == [g.cycles for g in pe.enumerate_sym(5)]


def test_relative_cycle_matrix():
    elements = pe.enumerate_sym(4)
    L = pe.relative_cycle_matrix(4)
    for i in (0, 5, 17):
        for j in (3, 11, 23):
            assert L[i, j] == elements[i].inverse().compose(elements[j]).cycles
    assert pe.cayley_distance(elements[0], Permutation.cycle(4)) == 3


def test_cayley_distance_triangle_inequality_on_s4():
    elements = pe.enumerate_sym(4)
    D = 4 - pe.relative_cycle_matrix(4)
    assert all(
        pe.cayley_distance(g, h) == D[i, j] for i, g in enumerate(elements) for j, h in enumerate(elements)
    )
    assert np.all(np.diag(D) == 0)
    # D[i, j] <= D[i, l] + D[l, j] para todo (i, l, j)
    assert np.all(D[:, None, :] <= D[:, :, None] + D[None, :, :])

def test_enumeration_cap():
    with pytest.raises(ResourceError):
        pe.sym_images(9)


@pytest.mark.parametrize("k", range(1, 7))
@pytest.mark.parametrize("D", range(2, 6))
def test_permutation_sum_identity(k, D):
    assert pe.permutation_sum(D, k) == pe.rising_factorial(D, k)
    assert pe.rising_factorial(D, k) == math.factorial(D + k - 1) // math.factorial(D - 1)


@pytest.mark.parametrize("k, q", [(2, 1), (3, 1), (2, 2), (3, 2)])
def test_cycle_inequality_with_reference_cycle(k, q):
    sigma_inv = Permutation.cycle(k + q, k).inverse()
    for g in pe.enumerate_sym(k + q):
        assert g.cycles + sigma_inv.compose(g).cycles <= k + 1 + 2 * q


# ---------------------------------------------------------------------------
# Operadores de permutação
# ---------------------------------------------------------------------------

def test_perm_operator_is_a_representation():
    elements = pe.enumerate_sym(3)
    ops = {g: pe.perm_operator(g, 1, 2) for g in elements}
    for g in elements:
        assert np.trace(ops[g]).real == pytest.approx(2 ** g.cycles)
        for h in elements:
            np.testing.assert_array_equal(ops[g] @ ops[h], ops[g.compose(h)])


def test_perm_operator_budget():
    with pytest.raises(ResourceError):
        pe.perm_operator(Permutation.identity(4), 2, 3, budget=4096)


def test_ghs_moment_purity():
    moment = pe.ghs_moment(1, 1, 2, 2)
    swap = pe.perm_operator(Permutation.transposition(2, 0, 1), 1, 2)
    assert moment.trace() == pytest.approx(1.0)
    assert np.trace(swap @ moment.matrix).real == pytest.approx(0.8)
    assert pe.replica_symmetry_deviation(moment) < 1e-12


@pytest.mark.parametrize("k", [2, 3])
def test_moment_from_large_t_alpha_is_ghs(k):
    expected = pe.ghs_moment(1, 2, 2, k)
    built = pe.moment_from_alpha(pe.alpha_large_t(2, 2, k), 1, 2)
    np.testing.assert_allclose(built.matrix, expected.matrix, atol=1e-12)


# ---------------------------------------------------------------------------
# Coeficientes α(g)
# ---------------------------------------------------------------------------

def test_alpha_large_t_and_large_d():
    np.testing.assert_allclose(pe.alpha_large_t(2, 2, 2).values, [1.0, 0.25])
    assert pe.alpha_large_d(2, 2, 2).by_cycle_type() == {"1+1": 1.0, "2": 0.25}
    table = pe.alpha_large_d(2, 2, 3).by_cycle_type()
    assert table == {"1+1+1": 1.0, "1+2": 0.25, "3": 0.0}


def test_sparse_ratio_matches_consecutive():
    sparse = pe.sparse_alpha(1, 2, 2).by_cycle_type()
    consecutive = pe.alpha_large_t(2, 2, 2).by_cycle_type()
    assert sparse["2"] / sparse["1+1"] == consecutive["2"] / consecutive["1+1"] == 0.25


def test_sparse_finite_t_tends_to_large_t():
    finite = pe.sparse_alpha_finite_t(2, 40, 2, 3)
    np.testing.assert_allclose(finite.values, pe.sparse_alpha(2, 2, 3).values, atol=1e-8)


def test_finite_t_tends_to_large_t():
    finite = pe.solve_alpha_finite_t(40, 2, 2, 2)
    np.testing.assert_allclose(finite.values, pe.alpha_large_t(2, 2, 2).values, atol=1e-8)


def test_finite_t_at_large_d():
    d = 17
    finite = pe.solve_alpha_finite_t(12, 2, d, 3)
    np.testing.assert_allclose(finite.values, pe.alpha_large_d(2, d, 3).values, atol=1.0 / d ** 3)


def test_finite_t_convergence_rate():
    d, m, k = 2, 2, 3
    limit = pe.alpha_large_t(m, d, k).values
    errors = [
        float(np.max(np.abs(pe.solve_alpha_finite_t(t, m, d, k).values - limit)))
        for t in (4, 8, 12, 16, 20)
    ]
    for before, after in zip(errors, errors[1:]):
        assert after < before
        assert 1 / d ** 5 <= after / before <= 1 / d ** 3


def test_finite_t_matches_projector_oracle():
    t, m, d, k = 3, 2, 2, 2
    n = m // 2
    elements = pe.enumerate_sym(k)
    identity = Permutation.identity(k)
    full = {g: np.kron(pe.perm_operator(g, t + 1 - n, d), pe.perm_operator(g, n, d)) for g in elements}
    boundary = sum(
        d ** (n * (g.cycles - k)) * np.kron(pe.perm_operator(g, t + 1 - n, d), pe.perm_operator(identity, n, d))
        for g in elements
    )
    scale = float(d) ** ((t + 1) * k)
    c = np.array([np.trace(full[g].T @ boundary).real / scale for g in elements])
    gram = np.array([[np.trace(full[g].T @ full[h]).real / scale for h in elements] for g in elements])
    np.testing.assert_allclose(
        pe.solve_alpha_finite_t(t, m, d, k).values, np.linalg.solve(gram, c), atol=1e-12
    )


@pytest.mark.parametrize("k", [2, 3])
def test_next_order_normalization(k):
    d, m, N_A, t = 2, 2, 2, 6
    coefficients = pe.alpha_next_order(t, m, d, k, N_A)
    weights = float(d) ** (N_A * pe.element_cycles(k))
    assert float(weights @ coefficients.leading) == pytest.approx(1.0, abs=1e-12)
    assert abs(float(weights @ coefficients.beta)) < 1e-12
    assert coefficients.K > 0


def test_deviation_prediction_value():
    assert pe.deviation_prediction(10, 2, 2, 2, 1) == pytest.approx(9.1553e-5, rel=1e-4)
    report = pe.deviation_prediction_report(10, 2, 2, 3, 2)
    assert report["small_k_regime"]
    with pytest.raises(ArgumentError):
        pe.deviation_prediction(10, 2, 2, 2, 3)


@pytest.mark.parametrize("N_A, m, t", [(1, 2, 3), (2, 2, 5), (2, 1, 4)])
def test_deviation_bound_closed_form_k2(N_A, m, t):
    d = 2
    x, D = float(d) ** m, float(d) ** N_A
    expected = (x - 1) * (D ** 2 - 1) / ((D * x + 1) ** 2 * float(d) ** (t + 1))
    assert pe.deviation_bound(t, m, d, 2, N_A, 1) == pytest.approx(expected, rel=1e-9)


def test_deviation_bound_approaches_prediction():
    bound = pe.deviation_bound(6, 2, 2, 2, 5, 1)
    assert bound == pytest.approx(pe.deviation_prediction(6, 2, 2, 2, 1), rel=0.02)
    assert pe.deviation_bound(6, 2, 2, 3, 3, 2) > 0


def test_global_haar_bath_bound():
    N_B = pe.global_haar_bath_bound(1, 2, 2, 0.1, 0.05)
    assert isinstance(N_B, int)
    assert pe.global_haar_failure_probability(1, N_B, 2, 2, 0.1) <= 0.05
    assert pe.global_haar_bath_bound(1, 2, 2, 0.01, 0.05) > N_B
    with pytest.raises(ArgumentError):
        pe.global_haar_bath_bound(1, 2, 2, 0.1, 1.5)


# ---------------------------------------------------------------------------
# Entropia condicional
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("k", [2, 3, 4])
@pytest.mark.parametrize("q", [1, 2])
def test_conditional_entropy_vanishes_at_criticality(k, q):
    for n in range(1, 7):
        assert abs(pe.conditional_entropy_analytic(n, n, 2, k, q)) < 1e-12


@pytest.mark.parametrize("k", [2, 3, 4])
@pytest.mark.parametrize("q", [1, 2])
def test_conditional_entropy_phases(k, q):
    assert pe.conditional_entropy_analytic(9, 3, 2, k, q) == pytest.approx(-math.log(2), abs=0.15)
    assert pe.conditional_entropy_analytic(3, 9, 2, k, q) == pytest.approx(math.log(2), abs=0.15)


@pytest.mark.parametrize("k", [2, 3, 4])
@pytest.mark.parametrize("q", [1, 2])
def test_conditional_entropy_is_antisymmetric(k, q):
    for N_A in range(1, 7):
        for m in range(1, 7):
            forward = pe.conditional_entropy_analytic(N_A, m, 2, k, q)
            backward = pe.conditional_entropy_analytic(m, N_A, 2, k, q)
            assert forward == pytest.approx(-backward, abs=1e-12)


@pytest.mark.parametrize("k", [2, 3])
def test_conditional_entropy_does_not_depend_on_q(k):
    teleporting = [pe.conditional_entropy_analytic(52, 2, 2, k, q) for q in (1, 2, 3)]
    decoupled = [pe.conditional_entropy_analytic(2, 52, 2, k, q) for q in (1, 2, 3)]
    assert max(teleporting) - min(teleporting) < 1e-9
    assert max(decoupled) - min(decoupled) < 1e-9
    assert teleporting[0] == pytest.approx(-math.log(2), abs=1e-9)
    assert decoupled[0] == pytest.approx(math.log(2), abs=1e-9)
    assert pe.conditional_entropy_analytic(5, 5, 2, k, 3) == 0.0


def test_conditional_entropy_approaches_teleportation_monotonically():
    values = [pe.conditional_entropy_analytic(N_A, 2, 2, 2, 1) for N_A in range(3, 9)]
    gaps = [value + math.log(2) for value in values]
    assert all(gap > 0 for gap in gaps)
    assert all(after < before for before, after in zip(gaps, gaps[1:]))


def test_conditional_entropy_report_and_phase():
    report = pe.conditional_entropy_report(9, 3, 2, 2)
    assert report.phase == "teleportation"
    assert report.value_log_d == pytest.approx(report.value / math.log(2))
    assert pe.entropy_phase(2, 2) == "critical"
    assert pe.entropy_phase(1, 3) == "decoupled"
    with pytest.raises(ArgumentError):
        pe.conditional_entropy_analytic(2, 2, 2, 1)


def test_conditional_entropy_finite_t_converges():
    analytic = pe.conditional_entropy_analytic(3, 1, 2, 2, 1)
    assert pe.conditional_entropy_finite_t(3, 1, 2, 2, 1, 60) == pytest.approx(analytic, abs=1e-6)
    with pytest.raises(ArgumentError):
        pe.conditional_entropy_finite_t(5, 1, 2, 2, 1, 2)


def test_alpha_json_keys():
    document = pe.alpha_large_t(2, 2, 3).to_json()
    assert set(document["alpha"]) == {"1+1+1", "1+2", "3"}
    assert document["k"] == 3
