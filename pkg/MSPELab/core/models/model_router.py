"""
MSPELab - Roteador de Modelos

Mapeia o nome do modelo da configuração para a classe que gera o estado.
"""

from typing import Dict, List, Optional, Sequence, Type

import numpy as np

from core.errors import ArgumentError
from core.models.dynamics_models import (
    DualUnitaryModel,
    DynamicsModel,
    GlobalHaarStateModel,
    KickedIsingModel,
    LocalHaarModel,
    MixedFieldIsingModel,
)

MODEL_CLASSES: Dict[str, Type[DynamicsModel]] = {
    cls.name: cls
    for cls in (
        DualUnitaryModel,
        LocalHaarModel,
        KickedIsingModel,
        MixedFieldIsingModel,
        GlobalHaarStateModel,
    )
}


def get_supported_models() -> List[str]:
    """Nomes de modelos aceitos na configuração."""
    return list(MODEL_CLASSES)


def get_model(
    name: str, params: Optional[dict] = None, fixed_gates: Sequence[np.ndarray] = ()
) -> DynamicsModel:
    """Instancia o modelo ``name``."""
    cls = MODEL_CLASSES.get(name)
    if cls is None:
        raise ArgumentError(f"Modelo desconhecido: {name} (suportados: {', '.join(MODEL_CLASSES)})")
    return cls(params, fixed_gates)
