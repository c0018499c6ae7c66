"""
MSPELab - Serialização JSON

Números complexos são gravados como pares [re, im]; matrizes como listas de
linhas desses pares. Nenhum formato binário é usado.
"""

import json
from pathlib import Path
from typing import Any, Union

import numpy as np


def complex_matrix_to_json(matrix: np.ndarray) -> list:
    """Converte uma matriz complexa em listas aninhadas de pares [re, im]."""
    arr = np.asarray(matrix, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def complex_matrix_from_json(data: list) -> np.ndarray:
    """Operação inversa de complex_matrix_to_json."""
    arr = np.asarray(data, dtype=float)
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise ValueError("Formato inválido: esperado pares [re, im]")
    return arr[..., 0] + 1j * arr[..., 1]


def _default(obj: Any):
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return complex_matrix_to_json(obj)
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"Objeto não serializável: {type(obj).__name__}")


def dumps(payload: Any) -> str:
    """JSON determinístico (chaves ordenadas, indentação fixa)."""
    return json.dumps(payload, default=_default, indent=2, sort_keys=True, ensure_ascii=False)


def write_json(path: Union[str, Path], payload: Any) -> Path:
    """Grava ``payload`` em ``path`` criando diretórios quando necessário."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(dumps(payload) + "\n", encoding="utf-8")
    return target


def read_json(path: Union[str, Path]) -> Any:
    """Lê um documento JSON."""
    return json.loads(Path(path).read_text(encoding="utf-8"))
