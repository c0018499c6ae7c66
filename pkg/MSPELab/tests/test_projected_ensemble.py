import numpy as np
import pytest

from core.engines.circuit_engine import bell_pair_initial_state
from core.engines.linalg_engine import QuditLayout, reduced_density_matrix
from core.engines.permutation_engine import replica_symmetry_deviation
from core.errors import ArgumentError, EmptyEnsembleError, ResourceError
from core.models.model_router import get_model
from core.mspe.moments import MomentTensor, weighted_tensor_power_sum
from core.mspe.projected_ensemble import (
    Partition,
    build_mspe,
    heisenberg_weyl_basis,
    measurement_pair_parity,
    moment,
    purity_averages,
)
from core.ensembles.random_ensembles import haar_state


@pytest.mark.parametrize("d", [2, 3])
def test_heisenberg_weyl_basis_is_orthonormal(d):
    basis = heisenberg_weyl_basis(d)
    np.testing.assert_allclose(basis @ basis.conj().T, np.eye(d * d), atol=1e-12)
    np.testing.assert_allclose(basis[0], np.eye(d).reshape(-1) / np.sqrt(d), atol=1e-12)


@pytest.mark.parametrize("depth, parity", [(None, 0), (0, 0), (1, 0), (2, 1), (3, 0), (6, 1)])
def test_measurement_pair_parity(depth, parity):
    assert measurement_pair_parity(depth) == parity


def test_partition_geometry():
    partition = Partition.build(QuditLayout(8, 2), 2, 2, depth=1)
    assert partition.a_sites == (0, 1)
    assert partition.lost_sites == (4, 5)
    assert partition.measurement_groups == ((2, 3), (6, 7))
    assert partition.n_outcomes == 16


def test_partition_with_reference_and_odd_parity():
    partition = Partition.build(QuditLayout(4, 2), 1, 0, reference=True, depth=2)
    assert partition.r_sites == (3,)
    assert partition.kept_sites == (0, 3)
    assert partition.measurement_groups == ((1, 2),)



def test_even_depth_measures_unpaired_sites_computationally():
    layout = QuditLayout(8, 2)
    even = Partition.build(layout, 2, 0, depth=2)
    assert even.measurement_groups == ((2,), (3, 4), (5, 6), (7,))
    assert even.computational_sites == (2, 7)
    assert Partition.build(layout, 2, 0, depth=1).computational_sites == ()
    assert Partition.build(layout, 1, 0, depth=2).computational_sites == (7,)
    assert Partition.build(layout, 2, 0, basis="computational").computational_sites == tuple(range(2, 8))

def test_sparse_partition_layout():
    partition = Partition.build(QuditLayout(12, 2), 2, 4, loss_layout="sparse", sparse_gap=2, depth=1)
    lost = partition.lost_sites
    assert len(lost) == 4
    assert lost[1] == lost[0] + 1 and lost[3] == lost[2] + 1
    assert lost[2] - lost[1] == 3
    assert all(s >= 2 for s in lost)
    with pytest.raises(ArgumentError):
        Partition.build(QuditLayout(12, 2), 2, 3, loss_layout="sparse")


def test_lost_sites_must_fit_in_bath():
    with pytest.raises(ArgumentError, match="sítios perdidos excedem o banho"):
        Partition.build(QuditLayout(6, 2), 2, 5)


@pytest.mark.parametrize(
    "model, n_sites, t",
    [
        ("local-haar", 6, 3),
        ("dual-unitary", 6, 3),
        ("kicked-ising", 6, 2),
        ("mixed-field-ising", 5, 1.5),
        ("global-haar-state", 5, 0),
    ],
)
def test_first_moment_is_reduced_density_matrix(model, n_sites, t):
    generator = get_model(model)
    layout = QuditLayout(n_sites, 2)
    state = generator.prepare_state(layout, t, 3, 0)
    partition = Partition.build(layout, 2, 1, basis=generator.default_basis, depth=int(t))
    ensemble = build_mspe(state, partition)
    ensemble.validate()
    first = moment(ensemble, 1)
    np.testing.assert_allclose(first.matrix, reduced_density_matrix(state, layout, partition.kept_sites), atol=1e-10)


def test_sparse_and_consecutive_share_first_moment():
    layout = QuditLayout(12, 2)
    state = get_model("local-haar").prepare_state(layout, 4, 9, 0)
    consecutive_partition = Partition.build(layout, 2, 4, depth=4)
    sparse_partition = Partition.build(layout, 2, 4, loss_layout="sparse", depth=4)
    assert consecutive_partition.lost_sites != sparse_partition.lost_sites
    consecutive = moment(build_mspe(state, consecutive_partition), 1)
    sparse = moment(build_mspe(state, sparse_partition), 1)
    np.testing.assert_allclose(consecutive.matrix, sparse.matrix, atol=1e-10)



def test_first_moment_does_not_depend_on_measurement_basis():
    layout = QuditLayout(6, 2)
    state = get_model("local-haar").prepare_state(layout, 3, 5, 0)
    paired = moment(build_mspe(state, Partition.build(layout, 2, 2, depth=3)), 1)
    single = moment(build_mspe(state, Partition.build(layout, 2, 2, basis="computational", depth=3)), 1)
    np.testing.assert_allclose(paired.matrix, single.matrix, atol=1e-10)


def test_mspe_moment_is_replica_symmetric():
    layout = QuditLayout(6, 2)
    state = get_model("local-haar").prepare_state(layout, 3, 8, 0)
    third = moment(build_mspe(state, Partition.build(layout, 1, 2, depth=3)), 3)
    assert replica_symmetry_deviation(third) < 1e-12

def test_reference_trace_matches_reference_as_lost_site():
    layout = QuditLayout(6, 2)
    state = get_model("local-haar").prepare_state(layout, 3, 1, 0)
    partition = Partition.build(layout, 2, 1, reference=True, depth=3)
    reduced = build_mspe(state, partition).reduce_reference()
    direct = build_mspe(state, partition.without_reference())
    np.testing.assert_allclose(reduced.probabilities, direct.probabilities, atol=1e-12)
    np.testing.assert_allclose(reduced.states, direct.states, atol=1e-12)


def test_entanglement_swapping_gives_pure_ar_states():
    layout = QuditLayout(4, 2)
    partition = Partition.build(layout, 1, 0, reference=True, depth=2)
    ensemble = build_mspe(bell_pair_initial_state(layout), partition)
    np.testing.assert_allclose(ensemble.probabilities, np.full(4, 0.25), atol=1e-12)
    avg_ar, avg_a = purity_averages(ensemble, 2)
    assert avg_ar == pytest.approx(1.0)
    assert avg_a == pytest.approx(0.5)


def test_outcome_labels_follow_groups():
    layout = QuditLayout(8, 2)
    ensemble = build_mspe(haar_state(layout.dim, 4), Partition.build(layout, 2, 2, depth=1))
    assert len(ensemble.outcome_labels(0)) == 2
    assert all(0 <= label < 4 for label in ensemble.outcome_labels(len(ensemble) - 1))


def test_probability_floor_and_budgets():
    layout = QuditLayout(6, 2)
    state = haar_state(layout.dim, 2)
    partition = Partition.build(layout, 2, 1, basis="computational")
    with pytest.raises(EmptyEnsembleError):
        build_mspe(state, partition, probability_floor=1.0)
    with pytest.raises(ResourceError):
        build_mspe(state, partition, outcome_budget=2)
    with pytest.raises(ArgumentError):
        build_mspe(state[:-1], partition)
    with pytest.raises(ArgumentError):
        purity_averages(build_mspe(state, partition), 2)


def test_weighted_tensor_power_sum_is_chunk_independent(random_density_matrix):
    states = np.stack([random_density_matrix(2) for _ in range(7)])
    weights = np.linspace(0.1, 0.7, 7)
    whole = weighted_tensor_power_sum(weights, states, 3)
    chunked = weighted_tensor_power_sum(weights, states, 3, chunk_elements=64)
    np.testing.assert_allclose(whole, chunked, atol=1e-14)
    expected = sum(w * np.kron(np.kron(s, s), s) for w, s in zip(weights, states))
    np.testing.assert_allclose(whole, expected, atol=1e-12)


def test_moment_tensor_json(random_density_matrix):
    original = MomentTensor(1, 2, random_density_matrix(2), {"source": "test"})
    restored = MomentTensor.from_json(original.to_json())
    np.testing.assert_allclose(restored.matrix, original.matrix)
    with pytest.raises(ArgumentError):
        MomentTensor.from_json({"k": 1})
