"""
MSPELab - Executor de Experimentos

Este módulo monta a fila de tarefas (ponto da varredura x realização),
executa-as num pool determinístico de threads e agrega os resultados em
arquivos CSV e JSON de metadados. Os arquivos só são escritos quando todas
as tarefas terminam com sucesso.

Autor: MSPELab Team
Versão: 1.0.0
"""

import csv
import hashlib
import io
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from core import __version__
from core.engines import permutation_engine as pe
from core.engines.linalg_engine import QuditLayout
from core.ensembles.random_ensembles import eigenvalue_histogram, histogram_to_csv
from core.errors import ArgumentError, ConfigError, MSPEError
from core.metrics.metrics import annealed_conditional_entropy, ensemble_distance, in_log_d_units
from core.models.model_router import get_model
from core.mspe.moments import MomentTensor
from core.mspe.projected_ensemble import MSPEnsemble, Partition, build_mspe, moment
from core.validators.config_validator import (
    LineIndex,
    fixed_gate_matrices,
    resolve_config,
    validate_config,
)
from utils.serialization import dumps, read_json, write_json

logger = logging.getLogger(__name__)

DISTANCE_COLUMNS = [
    "model", "N", "d", "N_A", "m", "loss_layout", "basis", "t", "k", "xi",
    "realizations", "delta_mean", "delta_stderr",
]
ENTROPY_COLUMNS = ["model", "N", "d", "N_A", "m", "t", "k", "I_mean", "I_stderr"]
SPECTRUM_COLUMNS = [
    "model", "N", "d", "N_A", "m", "t", "realizations", "rank", "eig_mean", "eig_variance", "target",
]


@dataclass(frozen=True)
class SweepPoint:
    """Um ponto (N, t) da grade de varredura."""

    n_sites: int
    t: Any

    @property
    def label(self) -> str:
        return f"N{self.n_sites}_t{self.t}"


class ExperimentJob:
    """Representa uma tarefa individual: um ponto da varredura numa realização."""

    def __init__(self, point: SweepPoint, realization: int):
        self.point = point
        self.realization = realization
        self.status = "pending"  # pending, processing, completed, failed
        self.error: Optional[MSPEError] = None
        self.result: Any = None

    @property
    def error_message(self) -> str:
        return str(self.error) if self.error else ""

    def __str__(self):
        return f"ExperimentJob(N={self.point.n_sites}, t={self.point.t}, r={self.realization})"


@dataclass
class RunResult:
    """Arquivos produzidos e linhas agregadas de uma execução."""

    command: str
    csv_path: Path
    json_path: Path
    rows: List[Dict[str, Any]]
    extra_files: List[Path] = field(default_factory=list)


def _mean_stderr(values: List[float]) -> Tuple[float, float]:
    """Média e erro padrão (ddof=1), somados na ordem das realizações."""
    array = np.asarray(values, dtype=float)
    mean = float(array.mean())
    if array.size < 2:
        return mean, 0.0
    return mean, float(array.std(ddof=1) / math.sqrt(array.size))


def _format(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def _csv_text(columns: List[str], rows: List[Dict[str, Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format(row[c]) for c in columns])
    return buffer.getvalue()


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    temporary = path.with_name(path.name + ".tmp")
    with temporary.open("w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    os.replace(temporary, path)


class ExperimentRunner:
    """Executor principal: gera as tarefas, despacha-as e agrega os resultados."""

    def __init__(self, config: dict, command: str = "distance", threads: int = 1):
        self.config = resolve_config(config)
        self.command = command
        self.threads = max(1, int(threads))
        self.jobs: List[ExperimentJob] = []
        self.progress_callback: Optional[Callable[[int, int, str], None]] = None
        self.status_callback: Optional[Callable[[str], None]] = None

        self.d = int(self.config["layout"]["d"])
        self.part = self.config["partition"]
        self.model = get_model(self.config["model"], self.config.get("params"), fixed_gate_matrices(self.config))
        self.seed = int(self.config["seed"])
        self.n_realizations = int(self.config["n_realizations"])
        if not self.model.randomized and self.n_realizations > 1:
            logger.info("Modelo %s é determinístico: usando uma única realização", self.model.name)
            self.n_realizations = 1
        self._references: Dict[int, MomentTensor] = {}

    def set_progress_callback(self, callback: Callable[[int, int, str], None]):
        """Define callback para atualização de progresso (concluídas, total, descrição)."""
        self.progress_callback = callback

    def set_status_callback(self, callback: Callable[[str], None]):
        """Define callback para atualização de status."""
        self.status_callback = callback

    def _status(self, message: str):
        logger.info(message)
        if self.status_callback:
            self.status_callback(message)

    # -- grade ---------------------------------------------------------------
    def sweep_points(self) -> List[SweepPoint]:
        """Pontos em ordem lexicográfica (N, depois t, na ordem da configuração)."""
        sweep = self.config["sweep"]
        return [SweepPoint(int(n), t) for n in sweep["N"] for t in sweep["t"]]

    def build_jobs(self) -> List[ExperimentJob]:
        self.jobs = [
            ExperimentJob(point, r)
            for point in self.sweep_points()
            for r in range(self.n_realizations)
        ]
        return self.jobs

    def partition_for(self, point: SweepPoint) -> Partition:
        return Partition.build(
            QuditLayout(point.n_sites, self.d),
            int(self.part["N_A"]),
            int(self.part["m"]),
            self.part["loss_layout"],
            bool(self.part["reference"]),
            self.part["basis"],
            depth=int(point.t),
            sparse_gap=int(self.part["sparse_gap"]),
        )

    # -- referências -----------------------------------------------------------
    def reference_moment(self, k: int) -> MomentTensor:
        """Momento de referência para a ordem k (calculado uma vez por execução)."""
        if k in self._references:
            return self._references[k]
        kind = self.config["reference_ensemble"]
        budget = int(self.config["budgets"]["moment"])
        n_a = int(self.part["N_A"])
        if kind == "ghs-analytic":
            reference = pe.ghs_moment(n_a, int(self.part["m"]), self.d, k, budget)
        elif kind == "haar-analytic":
            reference = pe.ghs_moment(n_a, 0, self.d, k, budget)
        else:
            reference = self._load_custom_reference(k)
        self._references[k] = reference
        return reference

    def _load_custom_reference(self, k: int) -> MomentTensor:
        document = read_json(self.config["reference_file"])
        documents = document if isinstance(document, list) else [document]
        for item in documents:
            candidate = MomentTensor.from_json(item)
            if candidate.k == k:
                return candidate
        raise ArgumentError(f"Arquivo de referência não contém momento com k = {k}")

    # -- tarefas -------------------------------------------------------------
    def _ensemble(self, job: ExperimentJob) -> MSPEnsemble:
        partition = self.partition_for(job.point)
        state = self.model.prepare_state(partition.layout, job.point.t, self.seed, job.realization)
        return build_mspe(
            state,
            partition,
            probability_floor=float(self.config["probability_floor"]),
            outcome_budget=int(self.config["budgets"]["outcomes"]),
        )

    def _compute(self, job: ExperimentJob) -> Any:
        ensemble = self._ensemble(job)
        if self.command == "entropy":
            return {k: annealed_conditional_entropy(ensemble, k) for k in self.config["k"]}
        if ensemble.partition.reference:
            ensemble = ensemble.reduce_reference()
        if self.command == "spectrum":
            return ensemble.probabilities, ensemble.states
        budget = int(self.config["budgets"]["moment"])
        result = {}
        for k in self.config["k"]:
            measured = moment(ensemble, k, budget)
            for xi in self.config["xi"]:
                result[(k, xi)] = ensemble_distance(measured, self.reference_moment(k), xi).normalized
        return result

    def _run_job(self, job: ExperimentJob) -> ExperimentJob:
        job.status = "processing"
        try:
            job.result = self._compute(job)
            job.status = "completed"
        except MSPEError as e:
            job.error = e
            job.status = "failed"
            logger.error("Falha em %s: %s", job, e)
        return job

    def execute(self) -> List[ExperimentJob]:
        """Executa todas as tarefas; a ordem do resultado é a ordem da fila."""
        if not self.jobs:
            self.build_jobs()
        if self.command == "distance":
            for k in self.config["k"]:
                self.reference_moment(k)
        total = len(self.jobs)
        self._status(f"Iniciando {total} tarefa(s) com {self.threads} thread(s)...")

        done = 0
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            for job in pool.map(self._run_job, self.jobs):
                done += 1
                if self.progress_callback:
                    self.progress_callback(done, total, str(job))

        failed = [job for job in self.jobs if job.status == "failed"]
        if failed:
            raise failed[0].error
        return self.jobs

    # -- agregação -------------------------------------------------------------
    def _by_point(self) -> Dict[SweepPoint, List[ExperimentJob]]:
        grouped: Dict[SweepPoint, List[ExperimentJob]] = {}
        for job in self.jobs:
            grouped.setdefault(job.point, []).append(job)
        return grouped

    def _base_row(self, point: SweepPoint) -> Dict[str, Any]:
        return {
            "model": self.model.name,
            "N": point.n_sites,
            "d": self.d,
            "N_A": int(self.part["N_A"]),
            "m": int(self.part["m"]),
            "t": point.t,
        }

    def distance_rows(self) -> List[Dict[str, Any]]:
        rows = []
        for point, jobs in self._by_point().items():
            for k in self.config["k"]:
                for xi in self.config["xi"]:
                    mean, stderr = _mean_stderr([job.result[(k, xi)] for job in jobs])
                    row = self._base_row(point)
                    row.update({
                        "loss_layout": self.part["loss_layout"],
                        "basis": self.part["basis"],
                        "k": k,
                        "xi": xi,
                        "realizations": len(jobs),
                        "delta_mean": mean,
                        "delta_stderr": stderr,
                    })
                    rows.append(row)
        return rows

    def entropy_rows(self) -> List[Dict[str, Any]]:
        rows = []
        for point, jobs in self._by_point().items():
            for k in self.config["k"]:
                mean, stderr = _mean_stderr([job.result[k] for job in jobs])
                row = self._base_row(point)
                row.update({"k": k, "I_mean": mean, "I_stderr": stderr})
                rows.append(row)
        return rows

    def histogram_rank(self) -> Optional[int]:
        setting = self.config["histogram"]["rank"]
        if setting == "full":
            return None
        if setting == "auto":
            return min(self.d ** int(self.part["N_A"]), self.d ** int(self.part["m"]))
        return int(setting)

    def spectrum_rows(self, stem: Path) -> Tuple[List[Dict[str, Any]], Dict[Path, Any]]:
        rows, histograms = [], {}
        settings = self.config["histogram"]
        rank = self.histogram_rank()
        for point, jobs in self._by_point().items():
            probabilities = np.concatenate([job.result[0] for job in jobs]) / len(jobs)
            states = np.concatenate([job.result[1] for job in jobs])
            histogram = eigenvalue_histogram(
                states,
                bins=int(settings["bins"]),
                rank=rank,
                weights=probabilities if settings["weighted"] else None,
            )
            histograms[stem.with_name(f"{stem.name}_{point.label}.csv")] = histogram
            row = self._base_row(point)
            row.update({
                "realizations": len(jobs),
                "rank": rank if rank is not None else states.shape[1],
                "eig_mean": histogram.mean,
                "eig_variance": histogram.variance,
                "target": 1.0 / self.d ** int(self.part["m"]),
            })
            rows.append(row)
        return rows, histograms

    def _analytic_summary(self) -> List[Dict[str, Any]]:
        """Previsões em t → ∞ anexadas ao JSON de metadados."""
        n_a, m = int(self.part["N_A"]), int(self.part["m"])
        summary = []
        for k in self.config["k"]:
            try:
                report = pe.conditional_entropy_report(n_a, m, self.d, k)
            except MSPEError as e:
                logger.debug("Previsão analítica indisponível para k=%d: %s", k, e)
                continue
            summary.append({"k": k, "I": report.value, "I_log_d": report.value_log_d, "phase": report.phase})
        return summary

    # -- execução completa -----------------------------------------------------
    def run(self, output: Optional[str] = None) -> RunResult:
        """Executa e grava ``<stem>.csv`` e ``<stem>.json``; nada é escrito em caso de falha."""
        started = time.perf_counter()
        self.build_jobs()
        self.execute()

        stem = Path(output or self.config["output"])
        if stem.suffix in (".csv", ".json"):
            stem = stem.with_suffix("")
        extra: Dict[Path, Any] = {}
        payload_extra: Dict[str, Any] = {}
        if self.command == "distance":
            rows, columns = self.distance_rows(), DISTANCE_COLUMNS
        elif self.command == "entropy":
            rows, columns = self.entropy_rows(), ENTROPY_COLUMNS
            payload_extra["entropy_log_d"] = [
                {"N": r["N"], "t": r["t"], "k": r["k"], "I_mean_log_d": in_log_d_units(r["I_mean"], self.d)}
                for r in rows
            ]
            payload_extra["analytic"] = self._analytic_summary()
        else:
            rows, extra = self.spectrum_rows(stem)
            columns = SPECTRUM_COLUMNS

        csv_text = _csv_text(columns, rows)
        for path, histogram in extra.items():
            histogram_to_csv(histogram, path)
        csv_path = stem.with_name(stem.name + ".csv")
        _atomic_write(csv_path, csv_text)

        metadata = {
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "version": __version__,
            "threads": self.threads,
            "realizations": self.n_realizations,
            "wall_time_s": time.perf_counter() - started,
            "csv": csv_path.name,
            "csv_sha256": hashlib.sha256(csv_text.encode("utf-8")).hexdigest(),
            "histograms": sorted(p.name for p in extra),
        }
        metadata.update(payload_extra)
        json_path = stem.with_name(stem.name + ".json")
        _atomic_write(json_path, dumps(metadata))
        self._status(f"Resultados gravados em {csv_path} e {json_path}")
        return RunResult(self.command, csv_path, json_path, rows, sorted(extra))


def run_experiment(
    config: dict,
    command: str = "distance",
    threads: int = 1,
    line_index: Optional[LineIndex] = None,
    output: Optional[str] = None,
    progress_callback: Optional[Callable[[int, int, str], None]] = None,
) -> RunResult:
    """Valida a configuração e executa o experimento.

    Raises:
        ConfigError: configuração inválida ou acima dos orçamentos (antes de qualquer cálculo).
        MSPEError: falha numérica ou de recurso durante a execução.
    """
    issues = validate_config(config, command, line_index, threads)
    if issues:
        raise ConfigError(issues)
    runner = ExperimentRunner(config, command, threads)
    if progress_callback:
        runner.set_progress_callback(progress_callback)
    return runner.run(output)


ALPHA_KINDS = ("large-t", "finite-t", "large-d", "sparse", "sparse-finite-t", "next-order")


def alpha_table(kind: str, k: int, d: int, m: float = 0, t: Optional[int] = None,
                n_pairs: int = 1, N_A: int = 1) -> Dict[str, Any]:
    """Tabela de coeficientes α por tipo de ciclo, pronta para JSON."""
    if kind == "large-t":
        return pe.alpha_large_t(m, d, k).to_json()
    if kind == "large-d":
        return pe.alpha_large_d(m, d, k).to_json()
    if kind == "sparse":
        return pe.sparse_alpha(n_pairs, d, k).to_json()
    if kind in ("finite-t", "sparse-finite-t", "next-order") and t is None:
        raise ArgumentError(f"Tabela {kind} requer t")
    if kind == "finite-t":
        return pe.solve_alpha_finite_t(t, m, d, k).to_json()
    if kind == "sparse-finite-t":
        return pe.sparse_alpha_finite_t(n_pairs, t, d, k).to_json()
    if kind == "next-order":
        coefficients = pe.alpha_next_order(t, int(m), d, k, N_A)
        elements = pe.enumerate_sym(k)
        leading, beta = {}, {}
        for g, lead, corr in zip(elements, coefficients.leading, coefficients.beta):
            leading.setdefault(g.cycle_type, float(lead))
            beta.setdefault(g.cycle_type, float(corr))
        return {
            "k": k,
            "context": {"t": t, "m": m, "d": d, "N_A": N_A, "K": coefficients.K},
            "leading": leading,
            "beta": beta,
        }
    raise ArgumentError(f"Tipo de tabela desconhecido: {kind} (suportados: {', '.join(ALPHA_KINDS)})")


def dump_alpha(path: str, kind: str, **params) -> Path:
    """Grava a tabela de coeficientes em JSON."""
    table = alpha_table(kind, **params)
    table["kind"] = kind
    return write_json(path, table)
