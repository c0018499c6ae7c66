"""
MSPELab - Modelos Dinâmicos

Cada modelo sabe preparar o estado global de uma realização em um instante t
e declara a base de medição e as restrições de geometria que exige.

Modelos com pares de Bell (dual-unitário, Haar local, Ising chutado) medem
pares na base de Heisenberg-Weyl. O Ising de campo misto parte de |0⟩^N e o
estado global de Haar dispensa dinâmica; ambos medem na base computacional.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.engines.circuit_engine import (
    KICKED_ISING_DEFAULT,
    MIXED_FIELD_DEFAULT,
    CircuitSpec,
    Gate,
    HamiltonianSpec,
    bell_pair_initial_state,
    brickwall_apply,
    hamiltonian_evolve,
    is_dual_unitary,
    product_zero_state,
)
from core.engines.linalg_engine import QuditLayout
from core.errors import MSPEError
from core.ensembles.random_ensembles import haar_state

logger = logging.getLogger(__name__)


class DynamicsModel:
    """Base dos modelos: metadados e validação de geometria."""

    name = ""
    default_basis = "computational"
    supported_dims: Optional[Tuple[int, ...]] = None  # None: qualquer d >= 2
    requires_even_sites = False
    integer_time = True
    randomized = True
    dense_propagator = False  # exige a matriz d^N × d^N

    def __init__(self, params: Optional[dict] = None, fixed_gates: Sequence[np.ndarray] = ()):
        self.params = dict(params or {})
        self.fixed_gates = tuple(np.asarray(g, dtype=complex) for g in fixed_gates)

    def is_available(self, local_dim: int) -> bool:
        return self.supported_dims is None or local_dim in self.supported_dims

    def validate(self, n_sites: int, local_dim: int) -> List[Tuple[str, str]]:
        """Lista de (código, mensagem) para a geometria dada."""
        issues = []
        if not self.is_available(local_dim):
            issues.append((
                "unsupported-local-dim",
                f"Modelo {self.name} não suporta d = {local_dim} (suportados: {self.supported_dims})",
            ))
        if self.requires_even_sites and n_sites % 2:
            issues.append(("odd-sites", f"Modelo {self.name} requer N par, recebido {n_sites}"))
        issues.extend(self._validate_gates(local_dim))
        return issues

    def _validate_gates(self, local_dim: int) -> List[Tuple[str, str]]:
        return []

    def prepare_state(self, layout: QuditLayout, t, seed: int, realization: int) -> np.ndarray:
        raise NotImplementedError


class BellPairCircuitModel(DynamicsModel):
    """Pares de Bell evoluídos por uma parede de tijolos."""

    default_basis = "heisenberg-weyl"
    requires_even_sites = True
    gate_source = "haar-random"

    def _source(self) -> str:
        return "fixed-gate-list" if self.fixed_gates else self.gate_source

    def _validate_gates(self, local_dim: int) -> List[Tuple[str, str]]:
        issues = []
        for i, matrix in enumerate(self.fixed_gates):
            try:
                gate = Gate(matrix, label=f"fixed[{i}]")
            except MSPEError as e:
                issues.append(("invalid-gate", f"Porta fixa {i} inválida: {e}"))
                continue
            if gate.local_dim != local_dim:
                issues.append(("invalid-gate", f"Porta fixa {i} tem d = {gate.local_dim}, esperado {local_dim}"))
        return issues

    def circuit_spec(self, layout: QuditLayout, t: int, seed: int, realization: int) -> CircuitSpec:
        return CircuitSpec(
            layout=layout,
            depth=int(t),
            gate_source=self._source(),
            seed=seed,
            kicked_ising=tuple(self.params.get("kicked_ising", KICKED_ISING_DEFAULT)),
            fixed_gates=self.fixed_gates,
            stream=(realization,),
        )

    def prepare_state(self, layout: QuditLayout, t, seed: int, realization: int) -> np.ndarray:
        return brickwall_apply(bell_pair_initial_state(layout), self.circuit_spec(layout, t, seed, realization))


class DualUnitaryModel(BellPairCircuitModel):
    name = "dual-unitary"
    supported_dims = (2,)
    gate_source = "dual-unitary-random"

    def _validate_gates(self, local_dim: int) -> List[Tuple[str, str]]:
        issues = super()._validate_gates(local_dim)
        if issues:
            return issues
        for i, matrix in enumerate(self.fixed_gates):
            if not is_dual_unitary(Gate(matrix)):
                issues.append(("gate-not-dual-unitary", f"Porta fixa {i} não é dual-unitária"))
        return issues


class LocalHaarModel(BellPairCircuitModel):
    name = "local-haar"
    gate_source = "haar-random"


class KickedIsingModel(BellPairCircuitModel):
    """Cada camada é um período de Floquet do Ising chutado."""

    name = "kicked-ising"
    supported_dims = (2,)
    gate_source = "kicked-ising"
    randomized = False

    def _source(self) -> str:
        return self.gate_source


class MixedFieldIsingModel(DynamicsModel):
    """|0⟩^N evoluído por exp(−iHt) com H de campo misto; t é um tempo real."""

    name = "mixed-field-ising"
    supported_dims = (2,)
    integer_time = False
    randomized = False
    dense_propagator = True

    def prepare_state(self, layout: QuditLayout, t, seed: int, realization: int) -> np.ndarray:
        h_x, h_y, J = self.params.get("mixed_field", MIXED_FIELD_DEFAULT)
        spec = HamiltonianSpec(layout, float(h_x), float(h_y), float(J), float(t))
        return hamiltonian_evolve(product_zero_state(layout), spec)


class GlobalHaarStateModel(DynamicsModel):
    """Um estado de Haar em d^N por realização; t é ignorado."""

    name = "global-haar-state"

    def prepare_state(self, layout: QuditLayout, t, seed: int, realization: int) -> np.ndarray:
        return haar_state(layout.dim, seed, realization)
