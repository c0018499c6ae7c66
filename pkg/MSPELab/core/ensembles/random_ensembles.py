"""
MSPELab - Ensembles Aleatórios de Referência

Amostradores de Monte Carlo (estados puros de Haar e Hilbert-Schmidt
generalizado) e estimadores: momentos amostrados com erro padrão por
entrada e histogramas de autovalores.

Cada amostra usa um gerador derivado de (semente, índice da amostra); a
paralelização por threads não altera os resultados.
"""

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from core.errors import ArgumentError, NumericError
from core.mspe.moments import DEFAULT_CHUNK_ELEMENTS, DEFAULT_MOMENT_BUDGET, MomentTensor, check_moment_budget
from utils.rng import derive_rng

logger = logging.getLogger(__name__)

SAMPLER_KINDS = ("haar-pure", "ghs")
NEGATIVE_EIGEN_TOL = 1e-10


@dataclass(frozen=True)
class SamplerSpec:
    """Especificação de um amostrador: tipo, geometria (d, N_A, m), semente e tamanho."""

    kind: str
    local_dim: int
    n_a: int
    m: int = 0
    seed: int = 0
    n_samples: int = 1

    def __post_init__(self):
        if self.kind not in SAMPLER_KINDS:
            raise ArgumentError(f"Tipo de amostrador desconhecido: {self.kind}")
        if self.m < 0:
            raise ArgumentError(f"m deve ser >= 0, recebido {self.m}")
        if self.n_a < 1 or self.local_dim < 2:
            raise ArgumentError(f"Geometria inválida: d={self.local_dim}, N_A={self.n_a}")

    @property
    def subsystem_dim(self) -> int:
        return self.local_dim ** self.n_a


@dataclass(eq=False)
class MonteCarloMoment:
    """Momento amostrado e a matriz de erros padrão por entrada."""

    moment: MomentTensor
    stderr: np.ndarray
    n_samples: int


@dataclass(eq=False)
class EigenHistogram:
    edges: np.ndarray
    counts: np.ndarray
    mean: float
    variance: float


def haar_state(dim: int, seed, *key: int) -> np.ndarray:
    """Vetor gaussiano complexo normalizado (estado puro de Haar em C^dim)."""
    if int(dim) < 1:
        raise ArgumentError(f"Dimensão deve ser >= 1, recebida {dim}")
    rng = seed if isinstance(seed, np.random.Generator) else derive_rng(seed, *key)
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return psi / np.linalg.norm(psi)


def sample_ghs(spec: SamplerSpec, index: int = 0) -> np.ndarray:
    """Tr_m |ψ⟩⟨ψ| para ψ de Haar em N_A+m qudits (amostra ``index``)."""
    d_a = spec.subsystem_dim
    d_m = spec.local_dim ** spec.m
    psi = haar_state(d_a * d_m, spec.seed, index).reshape(d_a, d_m)
    return psi @ psi.conj().T


def _sample(spec: SamplerSpec, index: int) -> np.ndarray:
    if spec.kind == "haar-pure":
        psi = haar_state(spec.subsystem_dim, spec.seed, index)
        return np.outer(psi, psi.conj())
    return sample_ghs(spec, index)


def sample_states(spec: SamplerSpec, workers: int = 1, start: int = 0) -> np.ndarray:
    """Pilha (n_samples, D, D) de matrizes densidade, em ordem de índice."""
    indices = range(start, start + spec.n_samples)
    if workers <= 1:
        samples = [_sample(spec, i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(lambda i: _sample(spec, i), indices))
    return np.stack(samples) if samples else np.empty((0, spec.subsystem_dim, spec.subsystem_dim), complex)


def tensor_powers(states: np.ndarray, k: int) -> np.ndarray:
    """ρ^{⊗k} para cada matriz de uma pilha (n, D, D)."""
    result = states
    n, dim, _ = states.shape
    for j in range(1, k):
        size = dim ** j
        result = np.einsum("nab,ncd->nacbd", result, states).reshape(n, size * dim, size * dim)
    return result


def mc_moment(
    spec: SamplerSpec,
    k: int,
    workers: int = 1,
    budget: int = DEFAULT_MOMENT_BUDGET,
    chunk_elements: int = DEFAULT_CHUNK_ELEMENTS,
) -> MonteCarloMoment:
    """(1/n) Σ ρ^{⊗k} com erro padrão por entrada (estimador plug-in).

    Raises:
        ArgumentError: n_samples = 0.
    """
    if spec.n_samples < 1:
        raise ArgumentError("mc_moment requer n_samples >= 1")
    dim = check_moment_budget(spec.subsystem_dim, k, budget)
    states = sample_states(spec, workers)

    total = np.zeros((dim, dim), dtype=complex)
    total_sq = np.zeros((dim, dim), dtype=float)
    chunk = max(1, chunk_elements // (dim * dim))
    for start in range(0, spec.n_samples, chunk):
        powers = tensor_powers(states[start:start + chunk], k)
        total += powers.sum(axis=0)
        total_sq += (np.abs(powers) ** 2).sum(axis=0)

    n = spec.n_samples
    mean = total / n
    if n > 1:
        variance = np.clip((total_sq - n * np.abs(mean) ** 2) / (n - 1), 0.0, None)
        stderr = np.sqrt(variance / n)
    else:
        stderr = np.zeros_like(total_sq)
    moment = MomentTensor(k, spec.subsystem_dim, mean, {"source": f"mc-{spec.kind}", "n_samples": n})
    logger.debug("Momento de Monte Carlo k=%d com %d amostras", k, n)
    return MonteCarloMoment(moment, stderr, n)


def eigenvalue_histogram(
    states: Sequence[np.ndarray],
    bins: int = 64,
    rank: Optional[int] = None,
    weights: Optional[Sequence[float]] = None,
    value_range=(0.0, 1.0),
) -> EigenHistogram:
    """Histograma agregado dos autovalores de todas as matrizes.

    Args:
        states: Matrizes densidade de mesma dimensão.
        bins: Número de intervalos uniformes em ``value_range``.
        rank: Se dado, mantém apenas os ``rank`` maiores autovalores de cada estado.
        weights: Pesos por estado (ex.: probabilidades de Born).

    Raises:
        ArgumentError: entrada vazia ou dimensões diferentes.
        NumericError: autovalor abaixo de −1e-10.
    """
    if len(states) == 0:
        raise ArgumentError("Histograma requer ao menos um estado")
    dims = {np.shape(s) for s in states}
    if len(dims) != 1:
        raise ArgumentError(f"Estados com dimensões diferentes: {sorted(dims)}")
    stack = np.asarray(states, dtype=complex)
    values = np.linalg.eigvalsh(stack)[:, ::-1]
    if np.min(values) < -NEGATIVE_EIGEN_TOL:
        raise NumericError(f"Autovalor negativo {np.min(values):.3e} no histograma")
    values = np.clip(values, 0.0, None)
    if rank is not None:
        if not 1 <= rank <= values.shape[1]:
            raise ArgumentError(f"rank deve estar em [1, {values.shape[1]}], recebido {rank}")
        values = values[:, :rank]

    if weights is None:
        flat_weights = None
        mean = float(values.mean())
        variance = float(values.var())
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != (stack.shape[0],):
            raise ArgumentError("Um peso por estado é necessário")
        flat_weights = np.repeat(w, values.shape[1])
        mean = float(np.average(values.ravel(), weights=flat_weights))
        variance = float(np.average((values.ravel() - mean) ** 2, weights=flat_weights))

    counts, edges = np.histogram(values.ravel(), bins=bins, range=value_range, weights=flat_weights)
    return EigenHistogram(edges, counts, mean, variance)


def histogram_to_csv(histogram: EigenHistogram, path: Union[str, Path]) -> Path:
    """Exporta o histograma com colunas bin_left, bin_right, count."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["bin_left", "bin_right", "count"])
        for left, right, count in zip(histogram.edges[:-1], histogram.edges[1:], histogram.counts):
            writer.writerow([repr(float(left)), repr(float(right)), repr(count.item())])
    return target
