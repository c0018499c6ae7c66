"""
MSPELab - Geradores Aleatórios Determinísticos

Cada posição de sorteio (realização, camada, sítio, amostra...) deriva seu
próprio fluxo a partir da semente global, de modo que a ordem de execução
e o número de threads não alteram os resultados.
"""

import numpy as np

SEED_MASK = (1 << 64) - 1


def normalize_seed(seed) -> int:
    """Converte a semente para inteiro não negativo de 64 bits."""
    return int(seed) & SEED_MASK


def derive_seed_sequence(seed, *key: int) -> np.random.SeedSequence:
    """SeedSequence filha identificada pela chave (seed, *key)."""
    return np.random.SeedSequence(normalize_seed(seed), spawn_key=tuple(int(k) for k in key))


def derive_rng(seed, *key: int) -> np.random.Generator:
    """Gerador PCG64 independente para a posição ``key``."""
    return np.random.default_rng(derive_seed_sequence(seed, *key))
