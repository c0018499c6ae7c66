"""
MSPELab - Motor de Álgebra Linear

Primitivas densas compartilhadas por todos os módulos: produto tensorial,
traço parcial, decomposição hermitiana, exponencial de matrizes e normas
de Schatten.

Convenção de sítios: o sítio 0 é o qudit mais à esquerda e o índice
composto é big-endian (sítio 0 mais significativo).

Autor: MSPELab Team
Versão: 1.0.0
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np
import scipy.linalg

from core.errors import ArgumentError, NumericError, ResourceError

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-10
MAX_INDEX = np.iinfo(np.intp).max


@dataclass(frozen=True)
class QuditLayout:
    """Cadeia de ``n_sites`` qudits de dimensão local ``local_dim``."""

    n_sites: int
    local_dim: int = 2

    def __post_init__(self):
        if int(self.n_sites) < 1:
            raise ArgumentError(f"n_sites deve ser positivo, recebido {self.n_sites}")
        if int(self.local_dim) < 2:
            raise ArgumentError(f"Dimensão local deve ser >= 2, recebida {self.local_dim}")
        if self.local_dim ** self.n_sites > MAX_INDEX:
            raise ResourceError(
                f"Dimensão total {self.local_dim}^{self.n_sites} não cabe no tipo de índice"
            )

    @property
    def dim(self) -> int:
        return self.local_dim ** self.n_sites

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.local_dim,) * self.n_sites


def _require_finite(*matrices: np.ndarray):
    for matrix in matrices:
        if not np.all(np.isfinite(matrix)):
            raise ArgumentError("Matriz contém valores não finitos (NaN/Inf)")


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Produto tensorial padrão a ⊗ b.

    Raises:
        ArgumentError: entradas não finitas.
        ResourceError: a dimensão do resultado excede o tipo de índice.
    """
    a = np.atleast_2d(np.asarray(a))
    b = np.atleast_2d(np.asarray(b))
    _require_finite(a, b)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows * cols > MAX_INDEX:
        raise ResourceError(f"Produto tensorial {rows}x{cols} excede o tipo de índice")
    return np.kron(a, b)


def kron_all(matrices: Iterable[np.ndarray]) -> np.ndarray:
    """Produto tensorial de uma sequência, da esquerda para a direita."""
    result = np.ones((1, 1), dtype=complex)
    for matrix in matrices:
        result = kron(result, matrix)
    return result


def partial_trace(rho: np.ndarray, layout: QuditLayout, keep: Iterable[int]) -> np.ndarray:
    """Traço parcial mantendo os sítios ``keep`` (em ordem crescente).

    Args:
        rho: Matriz quadrada de dimensão d^N.
        layout: Geometria da cadeia.
        keep: Conjunto de sítios mantidos; vazio retorna a matriz 1x1 [Tr rho].

    Returns:
        Matriz densidade nos sítios mantidos.
    """
    rho = np.asarray(rho)
    n, d = layout.n_sites, layout.local_dim
    if rho.shape != (layout.dim, layout.dim):
        raise ArgumentError(
            f"Matriz {rho.shape} incompatível com {n} sítios de dimensão {d}"
        )
    keep = sorted(set(int(s) for s in keep))
    if any(s < 0 or s >= n for s in keep):
        raise ArgumentError(f"Sítios fora do intervalo [0, {n}): {keep}")

    traced = [s for s in range(n) if s not in keep]
    dk, dt = d ** len(keep), d ** len(traced)
    tensor = rho.reshape((d,) * (2 * n))
    order = keep + traced + [n + s for s in keep] + [n + s for s in traced]
    tensor = tensor.transpose(order).reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", tensor)


def schatten_norm(m: np.ndarray, xi: int) -> float:
    """Norma de Schatten: ξ=1 soma dos valores singulares, ξ=2 Frobenius."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ArgumentError(f"Norma de Schatten requer matriz quadrada, recebida {m.shape}")
    if xi == 1:
        return float(np.sum(scipy.linalg.svdvals(m)))
    if xi == 2:
        return float(np.linalg.norm(m, "fro"))
    raise ArgumentError(f"Índice de Schatten não suportado: {xi}")


def hermitian_deviation(m: np.ndarray) -> float:
    """Maior desvio absoluto entre m e m†."""
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def herm_eig(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Autodecomposição hermitiana com autovalores em ordem decrescente.

    Entradas dentro da tolerância são simetrizadas antes da decomposição.

    Raises:
        NumericError: desvio de hermiticidade acima de 1e-10.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ArgumentError(f"Matriz quadrada esperada, recebida {m.shape}")
    deviation = hermitian_deviation(m)
    if deviation > HERMITIAN_TOL:
        raise NumericError(f"Matriz não hermitiana: desvio {deviation:.3e}")
    values, vectors = scipy.linalg.eigh(0.5 * (m + m.conj().T))
    return values[::-1].copy(), vectors[:, ::-1].copy()


def herm_expm(h: np.ndarray, scale: float) -> np.ndarray:
    """exp(i·scale·h) para h hermitiana, via autodecomposição."""
    values, vectors = herm_eig(h)
    phases = np.exp(1j * scale * values)
    return (vectors * phases) @ vectors.conj().T


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    """Verifica ‖U†U − I‖₂ < tol."""
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]), 2) < tol


def reduced_density_matrix(state: np.ndarray, layout: QuditLayout, keep: Iterable[int]) -> np.ndarray:
    """Tr_{resto}|ψ⟩⟨ψ| sem formar o projetor global."""
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (layout.dim,):
        raise ArgumentError(f"Estado de dimensão {psi.shape} incompatível com d^N = {layout.dim}")
    keep = sorted(set(int(s) for s in keep))
    if any(s < 0 or s >= layout.n_sites for s in keep):
        raise ArgumentError(f"Sítios fora do intervalo [0, {layout.n_sites}): {keep}")
    rest = [s for s in range(layout.n_sites) if s not in keep]
    matrix = psi.reshape(layout.shape).transpose(keep + rest).reshape(layout.local_dim ** len(keep), -1)
    return matrix @ matrix.conj().T
