"""
MSPELab - Métricas

Distâncias de Schatten entre momentos, entropias de Rényi e a entropia
condicional recozida calculada a partir de ensembles simulados.
Logaritmos são naturais; cada entropia reportada também vem em unidades de log d.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict

import numpy as np

from core.engines.linalg_engine import herm_eig, schatten_norm
from core.engines.permutation_engine import EntropyResult, entropy_phase
from core.errors import ArgumentError, NumericError
from core.mspe.moments import MomentTensor
from core.mspe.projected_ensemble import MSPEnsemble, purity_averages

logger = logging.getLogger(__name__)

NEGATIVE_EIGEN_TOL = 1e-10
RANK_TOL = 1e-12


@dataclass(frozen=True)
class DistanceReport:
    """Δ_ξ^{(k)} = ‖ρ − ρ_ref‖_ξ / ‖ρ_ref‖_ξ."""

    k: int
    xi: int
    raw: float
    normalizer: float
    normalized: float

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


def ensemble_distance(measured: MomentTensor, reference: MomentTensor, xi: int) -> DistanceReport:
    """Distância normalizada pela norma do momento de referência.

    Raises:
        ArgumentError: dimensões ou k diferentes, ou ξ fora de {1, 2}.
    """
    if measured.k != reference.k or measured.matrix.shape != reference.matrix.shape:
        raise ArgumentError(
            f"Momentos incompatíveis: k={measured.k} {measured.matrix.shape} vs "
            f"k={reference.k} {reference.matrix.shape}"
        )
    raw = schatten_norm(measured.matrix - reference.matrix, xi)
    normalizer = schatten_norm(reference.matrix, xi)
    if normalizer <= 0:
        raise NumericError("Momento de referência com norma nula")
    return DistanceReport(measured.k, xi, raw, normalizer, raw / normalizer)


def _spectrum(rho: np.ndarray) -> np.ndarray:
    values, _ = herm_eig(rho)
    if values[-1] < -NEGATIVE_EIGEN_TOL:
        raise NumericError(f"Matriz densidade com autovalor negativo {values[-1]:.3e}")
    return np.clip(values, 0.0, None)


def renyi_entropy(rho: np.ndarray, k: float) -> float:
    """S_k = log(Tr ρ^k)/(1−k), k ≥ 0, k ≠ 1 (k = 0 conta o posto)."""
    if k < 0 or k == 1:
        raise ArgumentError(f"Ordem de Rényi deve ser >= 0 e diferente de 1, recebida {k}")
    values = _spectrum(np.asarray(rho, dtype=complex))
    if k == 0:
        power_trace = float(np.count_nonzero(values > RANK_TOL))
    else:
        power_trace = float(np.sum(values ** k))
    return math.log(power_trace) / (1.0 - k)


def in_log_d_units(value: float, d: int) -> float:
    return value / math.log(d)


def annealed_conditional_entropy(ensemble: MSPEnsemble, k: int) -> float:
    """I^{(k)}_{R:A} = −1/(k−1) · log( média Tr ρ_AR^k / média Tr ρ_A^k )."""
    avg_ar, avg_a = purity_averages(ensemble, k)
    return -(math.log(avg_ar) - math.log(avg_a)) / (k - 1)


def annealed_conditional_entropy_report(ensemble: MSPEnsemble, k: int) -> EntropyResult:
    """Valor, valor em unidades de log d e fase esperada (N_A vs m)."""
    value = annealed_conditional_entropy(ensemble, k)
    partition = ensemble.partition
    return EntropyResult(
        value,
        in_log_d_units(value, partition.layout.local_dim),
        entropy_phase(partition.n_a, partition.m),
    )
