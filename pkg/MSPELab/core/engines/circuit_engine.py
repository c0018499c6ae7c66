"""
MSPELab - Motor de Circuitos

Este módulo contém os estados iniciais, as famílias de portas (dual-unitária,
Haar, Ising chutado, Ising de campo misto) e a evolução em parede de tijolos
que produz o estado global |Ψ⟩.

Autor: MSPELab Team
Versão: 1.0.0
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from core.engines.linalg_engine import (
    QuditLayout,
    UNITARY_TOL,
    herm_expm,
    is_unitary,
    kron_all,
)
from core.errors import ArgumentError, NumericError
from utils.rng import derive_rng

logger = logging.getLogger(__name__)

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)

# Fontes de portas aceitas por CircuitSpec
GATE_SOURCES = ("dual-unitary-random", "haar-random", "kicked-ising", "fixed-gate-list")

KICKED_ISING_DEFAULT = (0.9, 0.7, 0.6)
MIXED_FIELD_DEFAULT = (0.8090, 0.9045, 1.0)


@dataclass(frozen=True, eq=False)
class Gate:
    """Porta de dois qudits (matriz d² × d²) com rótulo."""

    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        dim = matrix.shape[0]
        local = int(round(np.sqrt(dim)))
        if matrix.shape != (dim, dim) or local * local != dim:
            raise ArgumentError(f"Porta deve ser d²×d², recebida {matrix.shape}")
        if not is_unitary(matrix, UNITARY_TOL):
            raise NumericError(f"Porta '{self.label}' não é unitária")
        object.__setattr__(self, "matrix", matrix)

    @property
    def local_dim(self) -> int:
        return int(round(np.sqrt(self.matrix.shape[0])))


@dataclass(frozen=True, eq=False)
class CircuitSpec:
    """Circuito em parede de tijolos com ``depth`` camadas.

    A camada ℓ par atua nos pares (0,1),(2,3),...; a ímpar em (1,2),(3,4),...
    ``stream`` prefixa a chave de sorteio de cada porta (ex.: índice da realização).
    """

    layout: QuditLayout
    depth: int
    gate_source: str = "haar-random"
    seed: int = 0
    kicked_ising: Tuple[float, float, float] = KICKED_ISING_DEFAULT
    fixed_gates: Tuple[np.ndarray, ...] = field(default_factory=tuple)
    stream: Tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if int(self.depth) < 0:
            raise ArgumentError(f"Profundidade negativa: {self.depth}")
        if self.gate_source not in GATE_SOURCES:
            raise ArgumentError(f"Fonte de portas desconhecida: {self.gate_source}")
        if self.gate_source == "fixed-gate-list" and not self.fixed_gates:
            raise ArgumentError("fixed-gate-list requer ao menos uma porta")
        if self.gate_source in ("dual-unitary-random", "kicked-ising") and self.layout.local_dim != 2:
            raise ArgumentError(f"Fonte {self.gate_source} suporta apenas d = 2")


@dataclass(frozen=True)
class HamiltonianSpec:
    """H = Σ (h_x σx + h_y σy) + Σ J σx σx em cadeia aberta de qubits."""

    layout: QuditLayout
    h_x: float = MIXED_FIELD_DEFAULT[0]
    h_y: float = MIXED_FIELD_DEFAULT[1]
    J: float = MIXED_FIELD_DEFAULT[2]
    time: float = 0.0

    def __post_init__(self):
        if self.layout.local_dim != 2:
            raise ArgumentError("Hamiltoniano de campo misto requer d = 2")


# ---------------------------------------------------------------------------
# Estados iniciais
# ---------------------------------------------------------------------------

def bell_pair_initial_state(layout: QuditLayout) -> np.ndarray:
    """|φ₀⟩^{⊗N/2} com |φ₀⟩ = Σᵢ|ii⟩/√d nos pares (0,1),(2,3),..."""
    n, d = layout.n_sites, layout.local_dim
    if n % 2:
        raise ArgumentError(f"Estado de pares de Bell requer N par, recebido {n}")
    pair = np.eye(d, dtype=complex).reshape(d * d) / np.sqrt(d)
    state = np.ones(1, dtype=complex)
    for _ in range(n // 2):
        state = np.kron(state, pair)
    return state


def product_zero_state(layout: QuditLayout) -> np.ndarray:
    """|0⟩^{⊗N}."""
    state = np.zeros(layout.dim, dtype=complex)
    state[0] = 1.0
    return state


# ---------------------------------------------------------------------------
# Famílias de portas
# ---------------------------------------------------------------------------

def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Unitária de Haar via QR de uma matriz de Ginibre com fase fixada."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = scipy.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def haar_gate(local_dim: int, seed, *key: int) -> Gate:
    """Porta de dois qudits sorteada pela medida de Haar.

    Args:
        local_dim: Dimensão local d.
        seed: Semente global, ou um ``np.random.Generator`` já derivado.
        key: Chave adicional da posição (camada, sítio...).
    """
    rng = seed if isinstance(seed, np.random.Generator) else derive_rng(seed, *key)
    return Gate(haar_unitary(local_dim * local_dim, rng), label="haar")


def _dual_unitary_core(J: float) -> np.ndarray:
    xx = np.kron(PAULI_X, PAULI_X)
    yy = np.kron(PAULI_Y, PAULI_Y)
    zz = np.kron(PAULI_Z, PAULI_Z)
    return herm_expm((np.pi / 4) * (xx + yy) + J * zz, -1.0)


def dual_unitary_gate(
    J: float,
    locals_: Optional[Sequence[np.ndarray]] = None,
    local_dim: int = 2,
) -> Gate:
    """(u₁⊗u₂)·exp(−i[(π/4)(XX+YY) + J·ZZ])·(v₁⊗v₂).

    Args:
        J: Acoplamento ZZ.
        locals_: Unitárias locais (u₁, u₂, v₁, v₂); None usa identidades.
        local_dim: Apenas d = 2 é suportado.
    """
    if local_dim != 2:
        raise ArgumentError(f"Porta dual-unitária parametrizada apenas para d = 2, recebido d = {local_dim}")
    if locals_ is None:
        locals_ = (PAULI_I,) * 4
    if len(locals_) != 4:
        raise ArgumentError("São necessárias quatro unitárias locais (u1, u2, v1, v2)")
    u1, u2, v1, v2 = (np.asarray(u, dtype=complex) for u in locals_)
    for u in (u1, u2, v1, v2):
        if u.shape != (2, 2) or not is_unitary(u):
            raise ArgumentError("Unitárias locais devem ser 2×2 unitárias")
    matrix = np.kron(u1, u2) @ _dual_unitary_core(J) @ np.kron(v1, v2)
    return Gate(matrix, label=f"dual-unitary(J={J:.4f})")


def random_dual_unitary_gate(rng: np.random.Generator) -> Gate:
    """J uniforme em [0, π/4] e unitárias locais de Haar."""
    J = rng.uniform(0.0, np.pi / 4)
    locals_ = [haar_unitary(2, rng) for _ in range(4)]
    return dual_unitary_gate(J, locals_)


def reshuffle(matrix: np.ndarray) -> np.ndarray:
    """Ũ_{(i,k),(j,l)} = U_{(i,j),(k,l)}: troca uma perna de entrada com uma de saída."""
    dim = matrix.shape[0]
    d = int(round(np.sqrt(dim)))
    return matrix.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(dim, dim)


def is_dual_unitary(gate: Gate) -> bool:
    """Verdadeiro se a matriz reorganizada espacialmente também é unitária."""
    shuffled = reshuffle(gate.matrix)
    return bool(np.linalg.norm(shuffled.conj().T @ shuffled - np.eye(shuffled.shape[0]), 2) < UNITARY_TOL)


# ---------------------------------------------------------------------------
# Ising chutado
# ---------------------------------------------------------------------------

def _z_values(layout: QuditLayout) -> np.ndarray:
    # bit 0 -> +1, bit 1 -> -1; sítio 0 é o mais significativo
    index = np.arange(layout.dim)
    shifts = np.arange(layout.n_sites - 1, -1, -1)
    bits = (index[:, None] >> shifts[None, :]) & 1
    return 1 - 2 * bits


def _ising_phases(layout: QuditLayout, J: float, g: float) -> np.ndarray:
    z = _z_values(layout)
    energy = g * z.sum(axis=1)
    if layout.n_sites > 1:
        energy = energy + J * (z[:, :-1] * z[:, 1:]).sum(axis=1)
    return np.exp(-1j * energy)


def _y_rotation(h: float) -> np.ndarray:
    # exp(−i h σy)
    return np.array([[np.cos(h), -np.sin(h)], [np.sin(h), np.cos(h)]], dtype=complex)


def kicked_ising_layer(h: float, J: float, g: float, layout: QuditLayout) -> np.ndarray:
    """Período de Floquet denso exp(−ihΣσy)·exp(−iJΣσzσz)·exp(−igΣσz)."""
    if layout.local_dim != 2:
        raise ArgumentError("Ising chutado requer d = 2")
    kick = kron_all([_y_rotation(h)] * layout.n_sites)
    return kick * _ising_phases(layout, J, g)[None, :]


def apply_single_site(state: np.ndarray, op: np.ndarray, site: int, layout: QuditLayout) -> np.ndarray:
    tensor = state.reshape(layout.shape)
    tensor = np.tensordot(op, tensor, axes=([1], [site]))
    return np.moveaxis(tensor, 0, site).reshape(-1)


def kicked_ising_apply(
    state: np.ndarray, h: float, J: float, g: float, layout: QuditLayout, periods: int = 1
) -> np.ndarray:
    """Aplica ``periods`` períodos de Floquet na forma fatorada (fases + rotações locais)."""
    if layout.local_dim != 2:
        raise ArgumentError("Ising chutado requer d = 2")
    phases = _ising_phases(layout, J, g)
    rotation = _y_rotation(h)
    psi = np.asarray(state, dtype=complex)
    for _ in range(int(periods)):
        psi = psi * phases
        for site in range(layout.n_sites):
            psi = apply_single_site(psi, rotation, site, layout)
    return psi


# ---------------------------------------------------------------------------
# Parede de tijolos
# ---------------------------------------------------------------------------

def apply_two_site_gate(state: np.ndarray, gate: np.ndarray, site: int, layout: QuditLayout) -> np.ndarray:
    """Aplica a porta no par (site, site+1)."""
    d = layout.local_dim
    tensor = state.reshape(layout.shape)
    tensor = np.tensordot(gate.reshape(d, d, d, d), tensor, axes=([2, 3], [site, site + 1]))
    return np.moveaxis(tensor, (0, 1), (site, site + 1)).reshape(-1)


def brick_positions(layer: int, n_sites: int) -> range:
    """Sítios à esquerda de cada porta na camada ``layer``."""
    return range(layer % 2, n_sites - 1, 2)


def gate_at(spec: CircuitSpec, layer: int, site: int) -> np.ndarray:
    """Porta da posição (camada, sítio), sorteada deterministicamente."""
    if spec.gate_source == "fixed-gate-list":
        position = layer * spec.layout.n_sites + site
        return np.asarray(spec.fixed_gates[position % len(spec.fixed_gates)], dtype=complex)
    rng = derive_rng(spec.seed, *spec.stream, layer, site)
    if spec.gate_source == "dual-unitary-random":
        return random_dual_unitary_gate(rng).matrix
    return haar_gate(spec.layout.local_dim, rng).matrix


def brickwall_apply(state: np.ndarray, spec: CircuitSpec) -> np.ndarray:
    """Evolui o estado por ``spec.depth`` camadas.

    Raises:
        ArgumentError: dimensão do estado incompatível com a geometria.
    """
    layout = spec.layout
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (layout.dim,):
        raise ArgumentError(f"Estado de dimensão {psi.shape} incompatível com d^N = {layout.dim}")
    if spec.gate_source == "kicked-ising":
        h, J, g = spec.kicked_ising
        return kicked_ising_apply(psi, h, J, g, layout, spec.depth)

    psi = psi.copy()
    for layer in range(spec.depth):
        for site in brick_positions(layer, layout.n_sites):
            psi = apply_two_site_gate(psi, gate_at(spec, layer, site), site, layout)
    logger.debug("Parede de tijolos aplicada: %d camadas em %d sítios", spec.depth, layout.n_sites)
    return psi


# ---------------------------------------------------------------------------
# Ising de campo misto
# ---------------------------------------------------------------------------

def mixed_field_hamiltonian(spec: HamiltonianSpec) -> np.ndarray:
    """Matriz densa do Hamiltoniano de campo misto.

    Preenchida diretamente pelos índices que cada termo X, Y ou XX troca,
    sem produtos de Kronecker intermediários. O sítio 0 é o bit mais
    significativo.
    """
    n = spec.layout.n_sites
    dim = spec.layout.dim
    index = np.arange(dim)
    h = np.zeros((dim, dim), dtype=complex)
    masks = [1 << (n - 1 - site) for site in range(n)]
    for mask in masks:
        h[index ^ mask, index] += spec.h_x
        # Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
        h[index ^ mask, index] += spec.h_y * np.where(index & mask, -1j, 1j)
    for left, right in zip(masks, masks[1:]):
        h[index ^ left ^ right, index] += spec.J
    return h


def hamiltonian_evolve(state: np.ndarray, spec: HamiltonianSpec) -> np.ndarray:
    """exp(−iHt)|ψ⟩ com o propagador denso de ``herm_expm``."""
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (spec.layout.dim,):
        raise ArgumentError(f"Estado de dimensão {psi.shape} incompatível com 2^N = {spec.layout.dim}")
    if spec.time == 0:
        return psi.copy()
    propagator = herm_expm(mixed_field_hamiltonian(spec), -spec.time)
    logger.debug("Propagador de campo misto construído (N=%d, t=%g)", spec.layout.n_sites, spec.time)
    return propagator @ psi
