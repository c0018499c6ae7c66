"""Configuração compartilhada dos testes do MSPELab."""

import sys
from pathlib import Path

import numpy as np
import pytest

# Adicionar o diretório raiz ao path para imports
sys.path.insert(0, str(Path(__file__).parent))

SCALING_CONFIG = """\
model: local-haar
layout:
  d: 2
partition:
  N_A: 2
  m: 2
sweep:
  N: [6, 8, 10]
  t: [1, 2, 3, 4]
k: [2]
xi: [1]
n_realizations: 25
seed: 1234
"""


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def random_density_matrix(rng):
    def make(dim: int, rank: int = None) -> np.ndarray:
        rank = rank or dim
        g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
        rho = g @ g.conj().T
        return rho / np.trace(rho).real

    return make


@pytest.fixture
def tmp_config(tmp_path):
    """Grava o texto de configuração num arquivo temporário e devolve o caminho."""

    def write(text: str = SCALING_CONFIG, name: str = "experiment.yaml") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
