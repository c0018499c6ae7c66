import math

import numpy as np
import pytest

from core.engines.circuit_engine import bell_pair_initial_state
from core.engines.linalg_engine import QuditLayout
from core.engines.permutation_engine import ghs_moment
from core.ensembles.random_ensembles import haar_state
from core.errors import ArgumentError, NumericError
from core.metrics.metrics import (
    annealed_conditional_entropy,
    annealed_conditional_entropy_report,
    ensemble_distance,
    in_log_d_units,
    renyi_entropy,
)
from core.mspe.moments import MomentTensor
from core.mspe.projected_ensemble import Partition, build_mspe


def test_renyi_entropy_values():
    rho = np.diag([0.75, 0.25])
    assert renyi_entropy(rho, 2) == pytest.approx(0.4700036, abs=1e-6)
    assert renyi_entropy(rho, 0) == pytest.approx(math.log(2))
    assert renyi_entropy(np.eye(4) / 4, 3) == pytest.approx(math.log(4))
    with pytest.raises(ArgumentError):
        renyi_entropy(rho, 1)
    with pytest.raises(NumericError):
        renyi_entropy(np.diag([1.2, -0.2]), 2)



def test_renyi_entropy_decreases_with_order(random_density_matrix):
    for dim in (2, 4, 8):
        rho = random_density_matrix(dim)
        entropies = [renyi_entropy(rho, k) for k in (0, 0.5, 2, 3, 4, 6)]
        assert all(after <= before + 1e-12 for before, after in zip(entropies, entropies[1:]))
        assert entropies[0] == pytest.approx(math.log(dim))

def test_in_log_d_units():
    assert in_log_d_units(math.log(9), 3) == pytest.approx(2.0)


def test_distance_to_itself_is_zero():
    reference = ghs_moment(1, 1, 2, 2)
    report = ensemble_distance(reference, reference, 1)
    assert report.raw == 0.0
    assert report.normalized == 0.0
    assert report.normalizer == pytest.approx(1.0)


def test_distance_is_normalized():
    reference = ghs_moment(1, 1, 2, 2)
    haar = ghs_moment(1, 0, 2, 2)
    report = ensemble_distance(haar, reference, 2)
    assert report.normalized == pytest.approx(report.raw / report.normalizer)
    assert report.as_dict()["xi"] == 2
    assert report.normalized > 0



def test_distance_between_orthogonal_pure_states():
    zero = MomentTensor(1, 2, np.diag([1.0, 0.0]))
    one = MomentTensor(1, 2, np.diag([0.0, 1.0]))
    report = ensemble_distance(zero, one, 1)
    assert report.raw == pytest.approx(2.0)
    assert report.normalized == pytest.approx(2.0)

def test_distance_rejects_mismatched_moments():
    with pytest.raises(ArgumentError):
        ensemble_distance(ghs_moment(1, 1, 2, 2), ghs_moment(1, 1, 2, 3), 1)
    zero = MomentTensor(1, 2, np.zeros((2, 2)))
    with pytest.raises(NumericError):
        ensemble_distance(zero, zero, 1)


def test_entanglement_swapping_is_teleporting():
    layout = QuditLayout(4, 2)
    partition = Partition.build(layout, 1, 0, reference=True, depth=2)
    ensemble = build_mspe(bell_pair_initial_state(layout), partition)
    assert annealed_conditional_entropy(ensemble, 2) == pytest.approx(-math.log(2), abs=1e-10)
    report = annealed_conditional_entropy_report(ensemble, 3)
    assert report.value_log_d == pytest.approx(-1.0, abs=1e-10)
    assert report.phase == "teleportation"


def test_lost_partners_decouple_reference():
    layout = QuditLayout(4, 2)
    partition = Partition.build(layout, 1, 2, reference=True)
    ensemble = build_mspe(bell_pair_initial_state(layout), partition)
    assert annealed_conditional_entropy(ensemble, 2) == pytest.approx(math.log(2), abs=1e-10)
    assert annealed_conditional_entropy_report(ensemble, 2).phase == "decoupled"


@pytest.mark.parametrize("m", [0, 1, 2])
def test_annealed_entropy_is_bounded_by_reference_dimension(m):
    layout = QuditLayout(6, 2)
    partition = Partition.build(layout, 1, m, reference=True, basis="computational")
    for realization in range(5):
        ensemble = build_mspe(haar_state(layout.dim, 31, realization), partition)
        value = annealed_conditional_entropy(ensemble, 2)
        assert -math.log(2) - 1e-12 <= value <= math.log(2) + 1e-12
