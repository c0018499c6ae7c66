import numpy as np
import pytest

from core.engines.permutation_engine import ghs_moment
from core.ensembles.random_ensembles import (
    SamplerSpec,
    eigenvalue_histogram,
    haar_state,
    histogram_to_csv,
    mc_moment,
    sample_ghs,
    sample_states,
)
from core.errors import ArgumentError, NumericError


def test_haar_state_is_normalized_and_keyed():
    psi = haar_state(16, 3, 1)
    assert np.linalg.norm(psi) == pytest.approx(1.0)
    np.testing.assert_array_equal(psi, haar_state(16, 3, 1))
    assert not np.allclose(psi, haar_state(16, 3, 2))


def test_sample_ghs_rank_and_trace():
    spec = SamplerSpec("ghs", 2, n_a=3, m=1, seed=5)
    rho = sample_ghs(spec, 0)
    values = np.linalg.eigvalsh(rho)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.count_nonzero(values > 1e-12) == 2
    assert values.min() > -1e-12


def test_sampler_spec_validation():
    with pytest.raises(ArgumentError):
        SamplerSpec("wishart", 2, 1)
    with pytest.raises(ArgumentError):
        SamplerSpec("ghs", 2, 1, m=-1)
    with pytest.raises(ArgumentError):
        mc_moment(SamplerSpec("ghs", 2, 1, n_samples=0), 2)


def test_sampling_is_thread_independent():
    spec = SamplerSpec("ghs", 2, n_a=2, m=1, seed=8, n_samples=12)
    np.testing.assert_array_equal(sample_states(spec, workers=1), sample_states(spec, workers=4))


def test_monte_carlo_matches_analytic_ghs():
    spec = SamplerSpec("ghs", 2, n_a=1, m=1, seed=2024, n_samples=10_000)
    estimate = mc_moment(spec, 2, workers=2)
    analytic = ghs_moment(1, 1, 2, 2)
    deviation = np.abs(estimate.moment.matrix - analytic.matrix)
    assert np.all(deviation <= 5 * estimate.stderr + 1e-12)

    states = sample_states(spec)
    purities = np.real(np.einsum("nab,nba->n", states, states))
    stderr = purities.std(ddof=1) / np.sqrt(purities.size)
    assert abs(purities.mean() - 0.8) <= 3 * stderr


def test_haar_pure_first_moment_is_maximally_mixed():
    spec = SamplerSpec("haar-pure", 2, n_a=1, seed=1, n_samples=4000)
    estimate = mc_moment(spec, 1)
    deviation = np.abs(estimate.moment.matrix - np.eye(2) / 2)
    assert np.all(deviation <= 5 * estimate.stderr + 1e-12)


def test_eigenvalue_histogram_counts(random_density_matrix):
    states = [random_density_matrix(4) for _ in range(5)]
    histogram = eigenvalue_histogram(states, bins=16)
    assert histogram.counts.sum() == 20
    assert histogram.mean == pytest.approx(0.25)

    top = eigenvalue_histogram(states, bins=16, rank=2)
    assert top.counts.sum() == 10

    weighted = eigenvalue_histogram(states, bins=16, rank=2, weights=[0.2] * 5)
    assert weighted.counts.sum() == pytest.approx(2.0)


def test_eigenvalue_histogram_rejects_bad_input(random_density_matrix):
    with pytest.raises(ArgumentError):
        eigenvalue_histogram([])
    with pytest.raises(ArgumentError):
        eigenvalue_histogram([random_density_matrix(2), random_density_matrix(4)])
    with pytest.raises(ArgumentError):
        eigenvalue_histogram([random_density_matrix(2)], rank=3)
    with pytest.raises(NumericError):
        eigenvalue_histogram([np.diag([1.5, -0.5])])


def test_histogram_csv(tmp_path, random_density_matrix):
    histogram = eigenvalue_histogram([random_density_matrix(2)], bins=4)
    path = histogram_to_csv(histogram, tmp_path / "out" / "hist.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "bin_left,bin_right,count"
    assert len(lines) == 5


def test_monte_carlo_stderr_shrinks_as_inverse_sqrt_n():
    small = mc_moment(SamplerSpec("haar-pure", 2, n_a=1, seed=12, n_samples=400), 1)
    large = mc_moment(SamplerSpec("haar-pure", 2, n_a=1, seed=12, n_samples=6400), 1)
    ratio = np.mean(small.stderr) / np.mean(large.stderr)
    assert ratio == pytest.approx(4.0, rel=0.15)
