"""
MSPELab - Ensemble Projetado de Estados Mistos

Este módulo constrói o ensemble {(P_α, ρ_α)} a partir de um estado global:
mede B₁∪B₃ (pares na base de Heisenberg-Weyl ou sítios na base
computacional), descarta os sítios perdidos de B₂ e, opcionalmente, mantém
o qudit de referência R sem medir.

Os estados condicionais saem de um reshape do vetor de amplitudes após a
rotação de base nos pares medidos; nenhum projetor explícito é aplicado.

Autor: MSPELab Team
Versão: 1.0.0
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.engines.linalg_engine import QuditLayout
from core.errors import ArgumentError, EmptyEnsembleError, NumericError, ResourceError
from core.mspe.moments import (
    DEFAULT_CHUNK_ELEMENTS,
    DEFAULT_MOMENT_BUDGET,
    MomentTensor,
    check_moment_budget,
    weighted_tensor_power_sum,
)
from utils.serialization import complex_matrix_to_json

logger = logging.getLogger(__name__)

BASES = ("heisenberg-weyl", "computational")
LOSS_LAYOUTS = ("consecutive", "sparse")
DEFAULT_OUTCOME_BUDGET = 1 << 24
PROBABILITY_EPS = 1e-14
ENSEMBLE_TOL = 1e-10


def heisenberg_weyl_basis(d: int) -> np.ndarray:
    """Os d² estados |φ_α⟩ = (I ⊗ X^a Z^b)|φ₀⟩, α = a·d + b, um por linha."""
    if d < 2:
        raise ArgumentError(f"Dimensão local deve ser >= 2, recebida {d}")
    shift = np.roll(np.eye(d, dtype=complex), 1, axis=0)  # X|j⟩ = |j+1⟩
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))  # Z|j⟩ = ω^j|j⟩
    phi0 = np.eye(d, dtype=complex).reshape(d * d) / np.sqrt(d)
    basis = np.empty((d * d, d * d), dtype=complex)
    for a in range(d):
        for b in range(d):
            sigma = np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
            basis[a * d + b] = np.kron(np.eye(d), sigma) @ phi0
    return basis


def measurement_pair_parity(depth: Optional[int]) -> int:
    """Paridade dos pares medidos: alinhada à última camada da parede de tijolos."""
    if not depth:
        return 0
    return (int(depth) - 1) % 2


@dataclass(frozen=True)
class Partition:
    """Divisão da cadeia em A = [0, N_A), sítios perdidos, referência R e sítios medidos."""

    layout: QuditLayout
    n_a: int
    lost_sites: Tuple[int, ...] = ()
    reference: bool = False
    basis: str = "heisenberg-weyl"
    pair_parity: int = 0

    def __post_init__(self):
        n = self.layout.n_sites
        lost = tuple(sorted(set(int(s) for s in self.lost_sites)))
        object.__setattr__(self, "lost_sites", lost)
        if self.basis not in BASES:
            raise ArgumentError(f"Base de medição desconhecida: {self.basis}")
        if self.n_a < 1:
            raise ArgumentError(f"N_A deve ser >= 1, recebido {self.n_a}")
        occupied = self.n_a + (1 if self.reference else 0)
        if occupied > n:
            raise ArgumentError(f"A e R ({occupied} sítios) não cabem em N = {n}")
        if any(s < self.n_a or s >= n for s in lost):
            raise ArgumentError(f"Sítios perdidos devem estar em B: {lost}")
        if self.reference and (n - 1) in lost:
            raise ArgumentError("O qudit de referência não pode ser um sítio perdido")

    # -- geometria -------------------------------------------------------
    @property
    def a_sites(self) -> Tuple[int, ...]:
        return tuple(range(self.n_a))

    @property
    def r_sites(self) -> Tuple[int, ...]:
        return (self.layout.n_sites - 1,) if self.reference else ()

    @property
    def kept_sites(self) -> Tuple[int, ...]:
        """Sítios onde vivem os estados condicionais (A e, se houver, R)."""
        return self.a_sites + self.r_sites

    @property
    def m(self) -> int:
        return len(self.lost_sites)

    @property
    def bath_sites(self) -> Tuple[int, ...]:
        excluded = set(self.a_sites) | set(self.r_sites)
        return tuple(s for s in range(self.layout.n_sites) if s not in excluded)

    @property
    def measured_sites(self) -> Tuple[int, ...]:
        lost = set(self.lost_sites)
        return tuple(s for s in self.bath_sites if s not in lost)

    @property
    def measurement_groups(self) -> Tuple[Tuple[int, ...], ...]:
        """Pares (s, s+1) medidos na base HW; sítios isolados vão para a base computacional."""
        # Com t par (paridade 1) o sítio de B vizinho a A fica sem par quando N_A é
        # par e também é medido na base computacional, além do último sítio.
        measured = self.measured_sites
        if self.basis == "computational":
            return tuple((s,) for s in measured)
        measured_set = set(measured)
        groups: List[Tuple[int, ...]] = []
        skip = set()
        for s in measured:
            if s in skip:
                continue
            if (s - self.pair_parity) % 2 == 0 and (s + 1) in measured_set:
                groups.append((s, s + 1))
                skip.add(s + 1)
            else:
                groups.append((s,))
        return tuple(groups)

    @property
    def computational_sites(self) -> Tuple[int, ...]:
        """Sítios medidos individualmente na base computacional."""
        return tuple(group[0] for group in self.measurement_groups if len(group) == 1)

    @property
    def outcome_radices(self) -> Tuple[int, ...]:
        d = self.layout.local_dim
        return tuple(d ** len(group) for group in self.measurement_groups)

    @property
    def n_outcomes(self) -> int:
        total = 1
        for radix in self.outcome_radices:
            total *= radix
        return total

    def without_reference(self) -> "Partition":
        """Mesma partição com R incorporado aos sítios perdidos."""
        if not self.reference:
            return self
        return replace(self, reference=False, lost_sites=self.lost_sites + self.r_sites)

    def to_json(self) -> Dict[str, Any]:
        return {
            "N": self.layout.n_sites,
            "d": self.layout.local_dim,
            "N_A": self.n_a,
            "lost_sites": list(self.lost_sites),
            "reference": self.reference,
            "basis": self.basis,
            "pair_parity": self.pair_parity,
        }

    # -- construção --------------------------------------------------------
    @classmethod
    def build(
        cls,
        layout: QuditLayout,
        n_a: int,
        m: int,
        loss_layout: str = "consecutive",
        reference: bool = False,
        basis: str = "heisenberg-weyl",
        depth: Optional[int] = None,
        sparse_gap: int = 2,
    ) -> "Partition":
        """Monta a partição com o bloco perdido centrado em B e alinhado aos pares."""
        if loss_layout not in LOSS_LAYOUTS:
            raise ArgumentError(f"Disposição de perdas desconhecida: {loss_layout}")
        parity = measurement_pair_parity(depth)
        end = layout.n_sites - (1 if reference else 0)
        n_bath = end - n_a
        if m < 0 or m > n_bath:
            raise ArgumentError(f"sítios perdidos excedem o banho: m = {m}, N_B = {n_bath}")

        if loss_layout == "consecutive":
            start = _aligned_start(n_a, end, m, parity, basis)
            lost = tuple(range(start, start + m))
        else:
            if m % 2:
                raise ArgumentError(f"Perdas esparsas requerem m par, recebido {m}")
            n_pairs = m // 2
            span = 2 * n_pairs + max(n_pairs - 1, 0) * sparse_gap
            if span > n_bath:
                raise ArgumentError(
                    f"sítios perdidos excedem o banho: {n_pairs} pares com intervalo {sparse_gap} ocupam {span} > {n_bath}"
                )
            start = _aligned_start(n_a, end, span, parity, basis)
            lost = tuple(
                start + i * (2 + sparse_gap) + j for i in range(n_pairs) for j in range(2)
            )
        return cls(layout, n_a, lost, reference, basis, parity)


def _aligned_start(n_a: int, end: int, width: int, parity: int, basis: str) -> int:
    start = n_a + (end - n_a - width) // 2
    if width == 0 or basis != "heisenberg-weyl" or (start - parity) % 2 == 0:
        return start
    if start - 1 >= n_a:
        return start - 1
    if start + 1 + width <= end:
        return start + 1
    return start


@dataclass(eq=False)
class MSPEnsemble:
    """Coleção ponderada {(P_α, ρ_α)} com os metadados da partição."""

    partition: Partition
    probabilities: np.ndarray
    states: np.ndarray
    outcomes: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.probabilities.shape[0])

    @property
    def subsystem_dim(self) -> int:
        return int(self.states.shape[1])

    def outcome_labels(self, index: int) -> Tuple[int, ...]:
        """Rótulos por grupo de medição (esquerda para a direita) do resultado ``index``."""
        radices = self.partition.outcome_radices
        if not radices:
            return ()
        return tuple(int(x) for x in np.unravel_index(int(self.outcomes[index]), radices))

    def validate(self, tol: float = ENSEMBLE_TOL) -> None:
        """Normalização das probabilidades, traço, hermiticidade e positividade."""
        total = float(self.probabilities.sum())
        if abs(total - 1.0) > tol:
            raise NumericError(f"Probabilidades somam {total:.12f}")
        traces = np.real(np.einsum("naa->n", self.states))
        if np.max(np.abs(traces - 1.0)) > tol:
            raise NumericError("Estado condicional com traço diferente de 1")
        herm = np.max(np.abs(self.states - np.conj(np.swapaxes(self.states, 1, 2))))
        if herm > tol:
            raise NumericError(f"Estado condicional não hermitiano: desvio {herm:.3e}")
        smallest = float(np.min(np.linalg.eigvalsh(self.states)))
        if smallest < -tol:
            raise NumericError(f"Estado condicional com autovalor {smallest:.3e}")

    def reduce_reference(self) -> "MSPEnsemble":
        """Traça R entrada a entrada."""
        if not self.partition.reference:
            return self
        d = self.partition.layout.local_dim
        da = self.subsystem_dim // d
        reduced = np.einsum("narbr->nab", self.states.reshape(len(self), da, d, da, d))
        return MSPEnsemble(
            self.partition.without_reference(),
            self.probabilities.copy(),
            reduced,
            self.outcomes.copy(),
            dict(self.metadata),
        )

    def to_json(self) -> Dict[str, Any]:
        return {
            "partition": self.partition.to_json(),
            "metadata": dict(self.metadata),
            "entries": [
                {
                    "outcome": list(self.outcome_labels(i)),
                    "probability": float(self.probabilities[i]),
                    "state": complex_matrix_to_json(self.states[i]),
                }
                for i in range(len(self))
            ],
        }


def _rotate_pairs(tensor: np.ndarray, partition: Partition) -> Tuple[np.ndarray, list]:
    """Contrai cada par medido com ⟨φ_α|; retorna o tensor e o rótulo de cada eixo."""
    d = partition.layout.local_dim
    labels: list = list(range(partition.layout.n_sites))
    bra = heisenberg_weyl_basis(d).conj().reshape(d * d, d, d)
    for group in partition.measurement_groups:
        if len(group) != 2:
            continue
        s, s1 = group
        axes = [labels.index(s), labels.index(s1)]
        tensor = np.tensordot(tensor, bra, axes=(axes, [1, 2]))
        labels = [label for label in labels if label not in (s, s1)] + [("pair", s)]
    return tensor, labels


def build_mspe(
    state: np.ndarray,
    partition: Partition,
    probability_floor: float = 0.0,
    outcome_budget: int = DEFAULT_OUTCOME_BUDGET,
    chunk_elements: int = DEFAULT_CHUNK_ELEMENTS,
) -> MSPEnsemble:
    """Constrói o MSPE de ``state`` para a ``partition``.

    Raises:
        ArgumentError: dimensão do estado incompatível.
        ResourceError: número de resultados acima de ``outcome_budget``.
        EmptyEnsembleError: nenhum resultado acima do piso de probabilidade.
    """
    layout = partition.layout
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (layout.dim,):
        raise ArgumentError(f"Estado de dimensão {psi.shape} incompatível com d^N = {layout.dim}")
    n_outcomes = partition.n_outcomes
    if n_outcomes > outcome_budget:
        raise ResourceError(
            f"{n_outcomes} resultados de medição excedem o orçamento de enumeração {outcome_budget}"
        )

    d = layout.local_dim
    tensor, labels = _rotate_pairs(psi.reshape(layout.shape), partition)
    outcome_labels = [("pair", g[0]) if len(g) == 2 else g[0] for g in partition.measurement_groups]
    order = (
        [labels.index(s) for s in partition.kept_sites]
        + [labels.index(s) for s in partition.lost_sites]
        + [labels.index(label) for label in outcome_labels]
    )
    d_keep = d ** len(partition.kept_sites)
    d_lost = d ** partition.m
    amplitudes = tensor.transpose(order).reshape(d_keep, d_lost, n_outcomes)

    threshold = max(float(probability_floor), PROBABILITY_EPS)
    chunk = max(1, chunk_elements // (d_keep * max(d_keep, d_lost)))
    kept_p, kept_states, kept_idx = [], [], []
    for start in range(0, n_outcomes, chunk):
        block = amplitudes[:, :, start:start + chunk]
        unnormalized = np.einsum("alo,blo->oab", block, block.conj())
        probs = np.real(np.einsum("oaa->o", unnormalized))
        mask = probs > threshold
        if np.any(mask):
            kept_p.append(probs[mask])
            kept_states.append(unnormalized[mask] / probs[mask, None, None])
            kept_idx.append(np.nonzero(mask)[0] + start)

    if not kept_p:
        raise EmptyEnsembleError(
            f"Nenhum resultado com probabilidade acima de {threshold:.1e} ({n_outcomes} resultados)"
        )
    probabilities = np.concatenate(kept_p)
    ensemble = MSPEnsemble(
        partition,
        probabilities,
        np.concatenate(kept_states),
        np.concatenate(kept_idx).astype(np.int64),
        {"n_outcomes": n_outcomes, "discarded_probability": max(0.0, 1.0 - float(probabilities.sum()))},
    )
    logger.debug(
        "MSPE construído: %d/%d resultados, dimensão %d", len(ensemble), n_outcomes, ensemble.subsystem_dim
    )
    return ensemble


def moment(
    ensemble: MSPEnsemble,
    k: int,
    budget: int = DEFAULT_MOMENT_BUDGET,
    chunk_elements: int = DEFAULT_CHUNK_ELEMENTS,
) -> MomentTensor:
    """Σ_α P_α ρ_α^{⊗k}, acumulado em ordem crescente de α."""
    check_moment_budget(ensemble.subsystem_dim, k, budget)
    matrix = weighted_tensor_power_sum(ensemble.probabilities, ensemble.states, k, chunk_elements)
    return MomentTensor(
        k,
        ensemble.subsystem_dim,
        matrix,
        {"source": "mspe", "partition": ensemble.partition.to_json()},
    )


def power_traces(states: np.ndarray, k: int) -> np.ndarray:
    """Tr ρ^k para cada matriz de uma pilha, via autovalores."""
    values = np.linalg.eigvalsh(states)
    values = np.clip(values, 0.0, None)
    return np.sum(values ** k, axis=1)


def purity_averages(ensemble: MSPEnsemble, k: int) -> Tuple[float, float]:
    """(Σ_α P_α Tr ρ_{AR,α}^k, Σ_α P_α Tr ρ_{A,α}^k).

    Raises:
        ArgumentError: ensemble sem qudit de referência ou k não inteiro < 2.
    """
    if not ensemble.partition.reference:
        raise ArgumentError("Médias de pureza requerem o qudit de referência R")
    if int(k) != k or k < 2:
        raise ArgumentError(f"k deve ser inteiro >= 2, recebido {k}")
    k = int(k)
    reduced = ensemble.reduce_reference()
    p = ensemble.probabilities
    return (
        float(np.dot(p, power_traces(ensemble.states, k))),
        float(np.dot(p, power_traces(reduced.states, k))),
    )
