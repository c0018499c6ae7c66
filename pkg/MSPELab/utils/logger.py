"""
MSPELab - Configuração de Logging

Centraliza a configuração de logs da aplicação. A saída no console usa
coloredlogs; opcionalmente um arquivo recebe o mesmo formato.

Autor: MSPELab Team
Versão: 1.0.0
"""

import logging
import os
from pathlib import Path
from typing import Optional

import coloredlogs

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DEFAULT_LEVEL = "INFO"
ENV_LEVEL = "MSPE_LOG_LEVEL"

_ROOT_LOGGER = "mspelab"


def resolve_level(level: Optional[str] = None) -> str:
    """Resolve o nível de log: argumento explícito, variável de ambiente ou padrão."""
    chosen = level or os.environ.get(ENV_LEVEL) or DEFAULT_LEVEL
    chosen = chosen.upper()
    if not isinstance(logging.getLevelName(chosen), int):
        chosen = DEFAULT_LEVEL
    return chosen


def setup_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> logging.Logger:
    """Configura o logger raiz da aplicação.

    Args:
        level: Nível de log (DEBUG, INFO, ...). Se None, usa MSPE_LOG_LEVEL ou INFO.
        log_file: Caminho opcional de arquivo de log.

    Returns:
        O logger raiz configurado.
    """
    resolved = resolve_level(level)
    root = logging.getLogger()
    coloredlogs.install(level=resolved, fmt=LOG_FORMAT, logger=root)

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        file_handler.setLevel(resolved)
        root.addHandler(file_handler)

    return logging.getLogger(_ROOT_LOGGER)


def get_logger(name: str) -> logging.Logger:
    """Retorna um logger nomeado."""
    return logging.getLogger(name)
