"""
MSPELab - Validador de Configuração

Este módulo contém o carregamento das configurações de experimento (YAML ou
JSON), o esquema jsonschema, o preenchimento de valores padrão e a
validação semântica e de orçamento. A validação nunca lança exceções nem
altera a configuração: devolve a lista de problemas encontrados, cada um com
a linha do arquivo quando conhecida.

Autor: MSPELab Team
Versão: 1.0.0
"""

import copy
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import psutil
import yaml
from jsonschema import Draft202012Validator

from core.engines.linalg_engine import QuditLayout
from core.errors import ArgumentError, ConfigError, ConfigIssue, MSPEError
from core.models.model_router import get_model, get_supported_models
from core.mspe.projected_ensemble import BASES, LOSS_LAYOUTS, Partition
from utils.serialization import complex_matrix_from_json

logger = logging.getLogger(__name__)

COMMANDS = ("distance", "entropy", "spectrum")
REFERENCE_ENSEMBLES = ("ghs-analytic", "haar-analytic", "custom-file")
ENV_SEED = "MSPE_SEED"

DEFAULTS: Dict[str, Any] = {
    "k": [2],
    "xi": [1],
    "reference_ensemble": "ghs-analytic",
    "n_realizations": 1,
    "seed": 0,
    "output": "results/experiment",
    "probability_floor": 0.0,
    "budgets": {"outcomes": 1 << 24, "moment": 4096, "dense_sites": 12},
    "histogram": {"bins": 64, "rank": "auto", "weighted": False},
    "params": {},
}

PARTITION_DEFAULTS = {"loss_layout": "consecutive", "sparse_gap": 2, "reference": False}

_positive_int = {"type": "integer", "minimum": 1}
_int_list = {"type": "array", "items": _positive_int, "minItems": 1}

EXPERIMENT_SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["model", "layout", "partition", "sweep"],
    "additionalProperties": False,
    "properties": {
        "model": {"enum": get_supported_models()},
        "layout": {
            "type": "object",
            "required": ["d"],
            "additionalProperties": False,
            "properties": {"N": _positive_int, "d": {"type": "integer", "minimum": 2}},
        },
        "partition": {
            "type": "object",
            "required": ["N_A", "m"],
            "additionalProperties": False,
            "properties": {
                "N_A": _positive_int,
                "m": {"type": "integer", "minimum": 0},
                "loss_layout": {"enum": list(LOSS_LAYOUTS)},
                "sparse_gap": {"type": "integer", "minimum": 0},
                "reference": {"type": "boolean"},
                "basis": {"enum": list(BASES)},
            },
        },
        "sweep": {
            "type": "object",
            "required": ["t"],
            "additionalProperties": False,
            "properties": {
                "N": _int_list,
                "t": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1},
            },
        },
        "k": _int_list,
        "xi": {"type": "array", "items": {"enum": [1, 2]}, "minItems": 1},
        "reference_ensemble": {"enum": list(REFERENCE_ENSEMBLES)},
        "reference_file": {"type": "string"},
        "n_realizations": _positive_int,
        "seed": {"type": "integer", "minimum": 0},
        "output": {"type": "string", "minLength": 1},
        "probability_floor": {"type": "number", "minimum": 0, "maximum": 1},
        "budgets": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"outcomes": _positive_int, "moment": _positive_int, "dense_sites": _positive_int},
        },
        "histogram": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "bins": _positive_int,
                "rank": {"anyOf": [_positive_int, {"const": "auto"}, {"const": "full"}]},
                "weighted": {"type": "boolean"},
            },
        },
        "params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kicked_ising": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
                "mixed_field": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
            },
        },
        "fixed_gates": {"type": "array", "minItems": 1},
    },
}

LineIndex = Dict[Tuple[Union[str, int], ...], int]


# ---------------------------------------------------------------------------
# Carregamento
# ---------------------------------------------------------------------------

def _index_lines(node, path: Tuple = (), index: Optional[LineIndex] = None) -> LineIndex:
    """Mapeia cada caminho da árvore YAML para sua linha (1-based)."""
    index = {} if index is None else index
    index[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            child = path + (key_node.value,)
            index[child] = key_node.start_mark.line + 1
            _index_lines(value_node, child, index)
            index[child] = key_node.start_mark.line + 1
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            _index_lines(item, path + (i,), index)
    return index


def parse_config_text(text: str) -> Tuple[Any, LineIndex]:
    """Lê YAML/JSON; devolve o documento e o índice de linhas.

    Raises:
        ConfigError: documento sintaticamente inválido.
    """
    try:
        document = yaml.safe_load(text)
        node = yaml.compose(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError([ConfigIssue("syntax", f"Erro de sintaxe: {getattr(e, 'problem', e)}", line=line)]) from e
    return document, (_index_lines(node) if node is not None else {})


def load_config(path: Union[str, Path]) -> Tuple[Any, LineIndex]:
    """Lê o arquivo de configuração."""
    target = Path(path)
    try:
        text = target.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError([ConfigIssue("unreadable", f"Não foi possível ler {target}: {e}")]) from e
    return parse_config_text(text)


def apply_overrides(config: dict, seed: Optional[int] = None, output: Optional[str] = None) -> dict:
    """Semente: flag --seed, depois MSPE_SEED, depois a configuração."""
    result = copy.deepcopy(config)
    env_seed = os.environ.get(ENV_SEED)
    if seed is not None:
        result["seed"] = int(seed)
    elif env_seed not in (None, ""):
        try:
            result["seed"] = int(env_seed)
        except ValueError:
            logger.warning("MSPE_SEED inválido ignorado: %r", env_seed)
    if output is not None:
        result["output"] = output
    return result


def resolve_config(config: dict) -> dict:
    """Cópia da configuração com os valores padrão preenchidos."""
    resolved = copy.deepcopy(config)
    for key, value in DEFAULTS.items():
        if isinstance(value, dict):
            merged = copy.deepcopy(value)
            merged.update(resolved.get(key) or {})
            resolved[key] = merged
        else:
            resolved.setdefault(key, copy.deepcopy(value))
    partition = resolved.setdefault("partition", {})
    for key, value in PARTITION_DEFAULTS.items():
        partition.setdefault(key, value)
    if "basis" not in partition:
        try:
            partition["basis"] = get_model(resolved.get("model", "")).default_basis
        except MSPEError:
            partition["basis"] = "computational"
    sweep = resolved.setdefault("sweep", {})
    if "N" not in sweep and "N" in resolved.get("layout", {}):
        sweep["N"] = [resolved["layout"]["N"]]
    return resolved


def fixed_gate_matrices(config: dict) -> list:
    """Portas fixas da configuração como matrizes complexas."""
    return [complex_matrix_from_json(g) for g in config.get("fixed_gates", [])]


# ---------------------------------------------------------------------------
# Validação
# ---------------------------------------------------------------------------

class ConfigValidator:
    """Validação estrutural (jsonschema), semântica e de orçamento."""

    def __init__(self, line_index: Optional[LineIndex] = None, threads: int = 1):
        self.line_index = line_index or {}
        self.threads = max(1, int(threads))
        self._schema = Draft202012Validator(EXPERIMENT_SCHEMA)

    def _line(self, path: Tuple) -> Optional[int]:
        path = tuple(path)
        while path not in self.line_index and path:
            path = path[:-1]
        return self.line_index.get(path)

    def _issue(self, code: str, message: str, path: Tuple = (), kind: str = "config") -> ConfigIssue:
        pointer = "/" + "/".join(str(p) for p in path) if path else ""
        return ConfigIssue(code, message, kind, pointer, self._line(path))

    def validate(self, config: Any, command: str = "distance") -> List[ConfigIssue]:
        try:
            return self._validate(config, command)
        except Exception as e:  # a validação nunca propaga exceções
            logger.exception("Falha interna na validação")
            return [self._issue("internal", f"Falha interna na validação: {e}")]

    def _validate(self, config: Any, command: str) -> List[ConfigIssue]:
        if command not in COMMANDS:
            return [self._issue("unknown-command", f"Comando desconhecido: {command}")]
        if not isinstance(config, dict):
            return [self._issue("schema", "A configuração deve ser um objeto (mapeamento)")]

        issues = [
            self._issue("schema", f"Esquema: {error.message}", tuple(error.absolute_path))
            for error in sorted(self._schema.iter_errors(config), key=lambda e: list(map(str, e.absolute_path)))
        ]
        if issues:
            return issues

        resolved = resolve_config(config)
        issues.extend(self._check_semantics(resolved, command))
        if issues:
            return issues
        issues.extend(self._check_budgets(resolved, command))
        return issues

    def _check_semantics(self, cfg: dict, command: str) -> List[ConfigIssue]:
        issues: List[ConfigIssue] = []
        d = cfg["layout"]["d"]
        part = cfg["partition"]
        sweep_n = cfg["sweep"].get("N")
        if not sweep_n:
            issues.append(self._issue("missing-size", "Informe layout.N ou sweep.N", ("sweep",)))
            return issues

        try:
            gates = fixed_gate_matrices(cfg)
        except (ValueError, TypeError) as e:
            return [self._issue("invalid-gate", f"Portas fixas inválidas: {e}", ("fixed_gates",))]
        model = get_model(cfg["model"], cfg.get("params"), gates)
        if gates and cfg["model"] not in ("dual-unitary", "local-haar"):
            issues.append(self._issue("fixed-gates-unsupported", f"Modelo {cfg['model']} não aceita portas fixas", ("fixed_gates",)))

        seen = set()
        for i, n_sites in enumerate(sweep_n):
            for code, message in model.validate(n_sites, d):
                if (code, message) in seen:
                    continue
                seen.add((code, message))
                path = ("sweep", "N", i) if code == "odd-sites" else (("layout", "d") if code == "unsupported-local-dim" else ("fixed_gates",))
                issues.append(self._issue(code, message, path))

        if model.integer_time:
            for i, t in enumerate(cfg["sweep"]["t"]):
                if float(t) != int(t):
                    issues.append(self._issue("non-integer-time", f"Modelo {cfg['model']} requer t inteiro, recebido {t}", ("sweep", "t", i)))

        reference = part["reference"]
        for i, n_sites in enumerate(sweep_n):
            n_bath = n_sites - part["N_A"] - (1 if reference else 0)
            if n_bath < 0:
                issues.append(self._issue(
                    "subsystem-exceeds-chain",
                    f"A{' e R' if reference else ''} não cabem em N = {n_sites}",
                    ("sweep", "N", i),
                ))
            elif part["m"] > n_bath:
                issues.append(self._issue(
                    "lost-sites-exceed-bath",
                    f"sítios perdidos excedem o banho: m = {part['m']} > N_B = {n_bath} (N = {n_sites})",
                    ("partition", "m"),
                ))
        if part["loss_layout"] == "sparse" and part["m"] % 2:
            issues.append(self._issue("sparse-odd-m", "Perdas esparsas requerem m par", ("partition", "m")))

        if command == "entropy":
            if not reference:
                issues.append(self._issue("reference-required", "O comando entropy requer partition.reference = true", ("partition", "reference")))
            for i, k in enumerate(cfg["k"]):
                if k < 2:
                    issues.append(self._issue("entropy-order", f"Entropia condicional requer k >= 2, recebido {k}", ("k", i)))

        if command == "distance" and cfg["reference_ensemble"] == "custom-file":
            ref = cfg.get("reference_file")
            if not ref or not Path(ref).is_file():
                issues.append(self._issue("missing-reference-file", f"Arquivo de referência não encontrado: {ref}", ("reference_file",)))
        return issues

    def _check_budgets(self, cfg: dict, command: str) -> List[ConfigIssue]:
        issues: List[ConfigIssue] = []
        d = cfg["layout"]["d"]
        part = cfg["partition"]
        budgets = cfg["budgets"]
        keep_sites = part["N_A"] + (1 if part["reference"] else 0)
        d_keep = d ** keep_sites

        moment_ks = cfg["k"] if command == "distance" else []
        for i, k in enumerate(moment_ks):
            dim = d ** (part["N_A"] * k)
            if dim > budgets["moment"]:
                issues.append(self._issue(
                    "moment-budget",
                    f"Momento d^(N_A·k) = {d}^({part['N_A']}·{k}) = {dim} excede o orçamento denso {budgets['moment']}",
                    ("k", i), kind="resource",
                ))

        dense = get_model(cfg["model"], cfg.get("params")).dense_propagator
        available = psutil.virtual_memory().available
        for i, n_sites in enumerate(cfg["sweep"]["N"]):
            if dense and n_sites > budgets["dense_sites"]:
                issues.append(self._issue(
                    "dense-diag-budget",
                    f"N = {n_sites} excede o orçamento de diagonalização densa ({budgets['dense_sites']} sítios)",
                    ("sweep", "N", i), kind="resource",
                ))
                continue
            for t in cfg["sweep"]["t"]:
                try:
                    partition = Partition.build(
                        QuditLayout(n_sites, d), part["N_A"], part["m"], part["loss_layout"],
                        part["reference"], part["basis"], depth=int(t), sparse_gap=part["sparse_gap"],
                    )
                except ArgumentError as e:
                    issues.append(self._issue("invalid-partition", str(e), ("partition",)))
                    return issues
                except MSPEError as e:
                    issues.append(self._issue("layout-budget", f"N = {n_sites}: {e}", ("sweep", "N", i), kind="resource"))
                    break
                n_out = partition.n_outcomes
                if n_out > budgets["outcomes"]:
                    issues.append(self._issue(
                        "outcome-budget",
                        f"Ponto (N={n_sites}, t={t}): {n_out} resultados excedem o orçamento {budgets['outcomes']}",
                        ("sweep", "N", i), kind="resource",
                    ))
                    break
                required = self.estimate_memory(n_sites, d, n_out, d_keep, max(cfg["k"]), dense) * self.threads
                if required > available:
                    issues.append(self._issue(
                        "memory-budget",
                        f"Ponto (N={n_sites}, t={t}): ~{required / 2**30:.2f} GiB necessários, "
                        f"{available / 2**30:.2f} GiB disponíveis",
                        ("sweep", "N", i), kind="resource",
                    ))
                    break
        return issues

    @staticmethod
    def estimate_memory(n_sites: int, d: int, n_outcomes: int, d_keep: int, k: int, dense: bool = False) -> int:
        """Bytes aproximados por tarefa: cópias do estado, estados condicionais e momento.

        Com ``dense`` soma seis matrizes d^N × d^N (H, autovetores, propagador
        e áreas de trabalho do autossolver).
        """
        complex_bytes = 16
        state = 4 * d ** n_sites
        if dense:
            state += 6 * d ** (2 * n_sites)
        ensemble = n_outcomes * d_keep * d_keep
        moment = 2 * min(d_keep ** (2 * k), 1 << 26)
        return complex_bytes * (state + ensemble + moment)


def validate_config(
    config: Any,
    command: str = "distance",
    line_index: Optional[LineIndex] = None,
    threads: int = 1,
) -> List[ConfigIssue]:
    """Lista de problemas (vazia se a configuração é válida). Nunca lança exceções."""
    return ConfigValidator(line_index, threads).validate(config, command)
