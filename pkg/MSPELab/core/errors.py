"""
MSPELab - Hierarquia de Erros

Cada categoria de erro carrega o código de saída usado pela linha de comando:
0 sucesso, 2 configuração/argumento, 3 recurso, 4 numérico.
"""

from dataclasses import dataclass
from typing import List, Optional


class MSPEError(Exception):
    """Erro base da aplicação."""

    exit_code = 1


class ArgumentError(MSPEError, ValueError):
    """Argumento inválido ou dimensões incompatíveis."""

    exit_code = 2


class ResourceError(MSPEError):
    """Orçamento de memória ou de enumeração excedido."""

    exit_code = 3


class NumericError(MSPEError, ArithmeticError):
    """Falha numérica: hermiticidade, condicionamento, autovalores negativos."""

    exit_code = 4


class EmptyEnsembleError(NumericError):
    """O piso de probabilidade eliminou todos os resultados de medição."""


@dataclass(frozen=True)
class ConfigIssue:
    """Problema encontrado na validação de uma configuração."""

    code: str
    message: str
    kind: str = "config"  # config, resource
    path: str = ""
    line: Optional[int] = None

    def __str__(self) -> str:
        where = f"linha {self.line}: " if self.line is not None else ""
        pointer = f" [{self.path}]" if self.path else ""
        return f"{where}{self.message}{pointer} ({self.code})"


class ConfigError(MSPEError):
    """Configuração inválida; agrega os problemas encontrados."""

    exit_code = 2

    def __init__(self, issues: List[ConfigIssue]):
        self.issues = list(issues)
        if self.issues and all(issue.kind == "resource" for issue in self.issues):
            self.exit_code = ResourceError.exit_code
        super().__init__("; ".join(str(issue) for issue in self.issues))
