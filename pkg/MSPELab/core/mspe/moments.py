"""
MSPELab - Tensores de Momento

O k-ésimo momento de um ensemble {(P_α, ρ_α)} é Σ_α P_α ρ_α^{⊗k}, uma matriz
densidade em k réplicas do subsistema. A ordem das réplicas é a ordem do
produto tensorial (réplica 0 mais significativa).
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np

from core.errors import ArgumentError, NumericError, ResourceError
from core.engines.linalg_engine import hermitian_deviation
from utils.serialization import complex_matrix_from_json, complex_matrix_to_json

logger = logging.getLogger(__name__)

DEFAULT_MOMENT_BUDGET = 4096
# Elementos complexos intermediários por bloco de acumulação
DEFAULT_CHUNK_ELEMENTS = 1 << 22


@dataclass(eq=False)
class MomentTensor:
    """Momento de ordem k em réplicas de um subsistema de dimensão ``subsystem_dim``."""

    k: int
    subsystem_dim: int
    matrix: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        expected = self.subsystem_dim ** self.k
        if self.matrix.shape != (expected, expected):
            raise ArgumentError(
                f"Momento k={self.k} em dimensão {self.subsystem_dim} requer {expected}x{expected}, "
                f"recebido {self.matrix.shape}"
            )

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def validate(self, tol: float = 1e-9) -> None:
        """Hermitiana, semidefinida positiva e de traço unitário dentro de ``tol``."""
        deviation = hermitian_deviation(self.matrix)
        if deviation > tol:
            raise NumericError(f"Momento não hermitiano: desvio {deviation:.3e}")
        if abs(self.trace() - 1.0) > tol:
            raise NumericError(f"Traço do momento {self.trace():.12f} difere de 1")
        smallest = float(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))[0])
        if smallest < -tol:
            raise NumericError(f"Momento com autovalor negativo {smallest:.3e}")

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "subsystem_dim": self.subsystem_dim,
            "matrix": complex_matrix_to_json(self.matrix),
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_json(cls, data: dict) -> "MomentTensor":
        try:
            return cls(
                k=int(data["k"]),
                subsystem_dim=int(data["subsystem_dim"]),
                matrix=complex_matrix_from_json(data["matrix"]),
                metadata=dict(data.get("metadata", {})),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ArgumentError(f"Documento de momento inválido: {e}") from e


def check_moment_budget(subsystem_dim: int, k: int, budget: int = DEFAULT_MOMENT_BUDGET) -> int:
    """Dimensão d^{N·k} do momento; ResourceError se exceder o orçamento."""
    if k < 1:
        raise ArgumentError(f"Ordem do momento deve ser >= 1, recebida {k}")
    dim = subsystem_dim ** k
    if dim > budget:
        raise ResourceError(
            f"Momento de dimensão {subsystem_dim}^{k} = {dim} excede o orçamento denso {budget}"
        )
    return dim


def weighted_tensor_power_sum(
    weights: np.ndarray,
    states: np.ndarray,
    k: int,
    chunk_elements: int = DEFAULT_CHUNK_ELEMENTS,
) -> np.ndarray:
    """Σ_n w_n ρ_n^{⊗k} para uma pilha de matrizes (n, D, D).

    Os blocos são somados em ordem crescente de n, o que torna o resultado
    independente do número de threads.
    """
    weights = np.asarray(weights, dtype=float)
    states = np.asarray(states, dtype=complex)
    n, dim, _ = states.shape
    flat = states.reshape(n, dim * dim)
    width = (dim * dim) ** (k - 1)
    chunk = max(1, chunk_elements // max(width, 1))

    total = np.zeros((width, dim * dim), dtype=complex)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        block = flat[start:stop]
        partial = weights[start:stop, None]
        for _ in range(k - 1):
            partial = (partial[:, :, None] * block[:, None, :]).reshape(stop - start, -1)
        total += partial.T @ block

    if k == 1:
        return total.reshape(dim, dim)
    # índices (a1 b1 a2 b2 ... ak bk) -> (a1..ak, b1..bk)
    tensor = total.reshape((dim, dim) * k)
    order = list(range(0, 2 * k, 2)) + list(range(1, 2 * k, 2))
    return tensor.transpose(order).reshape(dim ** k, dim ** k)
