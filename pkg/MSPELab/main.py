#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
MSPELab - Laboratório do Ensemble Projetado de Estados Mistos

Ponto de entrada principal da aplicação.
Este arquivo interpreta a linha de comando, configura o logging e despacha
os subcomandos distance, entropy, spectrum, alpha e validate.

Autor: MSPELab Team
Versão: 1.0.0
Licença: MIT
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

# Adicionar o diretório raiz ao path para imports
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

import psutil
from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn
from rich.table import Table

from core import __version__
from core.errors import ConfigError, ConfigIssue, MSPEError
from core.experiments.experiment_runner import ALPHA_KINDS, RunResult, dump_alpha, run_experiment
from core.validators.config_validator import COMMANDS, apply_overrides, load_config, validate_config
from utils.logger import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1


def default_threads() -> int:
    return psutil.cpu_count(logical=False) or 1


class MSPELabApp:
    """Classe principal da aplicação MSPELab."""

    def __init__(self, console: Optional[Console] = None):
        self.console = console or Console()
        self.parser = self.build_parser()

    def build_parser(self) -> argparse.ArgumentParser:
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--seed", type=int, help="Semente global (prevalece sobre MSPE_SEED e a configuração)")
        common.add_argument("--threads", type=int, default=None, help="Limite do pool de threads")
        common.add_argument("--output", help="Prefixo dos arquivos de saída")
        common.add_argument("--log-level", help="Nível de log (DEBUG, INFO, WARNING, ...)")
        common.add_argument("--log-file", help="Arquivo de log adicional")

        parser = argparse.ArgumentParser(
            prog="mspelab",
            description="MSPELab - ensemble projetado de estados mistos",
        )
        parser.add_argument("--version", "-v", action="version", version=f"MSPELab v{__version__}")
        subparsers = parser.add_subparsers(dest="command", required=True)

        for command, help_text in (
            ("distance", "Distância Δ_ξ^(k) ao ensemble de referência"),
            ("entropy", "Entropia condicional recozida I^(k)_{R:A}"),
            ("spectrum", "Histogramas de autovalores dos estados condicionais"),
        ):
            sub = subparsers.add_parser(command, parents=[common], help=help_text)
            sub.add_argument("config", help="Arquivo de configuração YAML ou JSON")
            sub.add_argument("--realizations", type=int, help="Sobrescreve n_realizations")

        validate = subparsers.add_parser("validate", parents=[common], help="Valida uma configuração")
        validate.add_argument("config", help="Arquivo de configuração YAML ou JSON")
        validate.add_argument("--for", dest="target", choices=COMMANDS, default="distance",
                              help="Subcomando para o qual validar")

        alpha = subparsers.add_parser("alpha", parents=[common], help="Tabelas de coeficientes α(g)")
        alpha.add_argument("--kind", choices=ALPHA_KINDS, default="large-t")
        alpha.add_argument("--k", type=int, default=2)
        alpha.add_argument("--d", type=int, default=2)
        alpha.add_argument("--m", type=float, default=2)
        alpha.add_argument("--t", type=int)
        alpha.add_argument("--n-pairs", type=int, default=1)
        alpha.add_argument("--N-A", dest="n_a", type=int, default=1)
        return parser

    # -- saída --------------------------------------------------------------
    def show_issues(self, issues: List[ConfigIssue], source: str):
        table = Table(title=f"Problemas em {source}")
        for column in ("Linha", "Código", "Tipo", "Caminho", "Mensagem"):
            table.add_column(column)
        for issue in issues:
            table.add_row(
                str(issue.line) if issue.line is not None else "-",
                issue.code, issue.kind, issue.path or "/", issue.message,
            )
        self.console.print(table)

    def show_result(self, result: RunResult):
        table = Table(title=f"{result.command}: {result.csv_path}")
        if result.rows:
            columns = list(result.rows[0])
            for column in columns:
                table.add_column(column)
            for row in result.rows:
                table.add_row(*(f"{row[c]:.6g}" if isinstance(row[c], float) else str(row[c]) for c in columns))
        self.console.print(table)
        self.console.print(f"Metadados: {result.json_path}")

    # -- subcomandos --------------------------------------------------------
    def _load(self, args) -> tuple:
        config, line_index = load_config(args.config)
        if isinstance(config, dict):
            config = apply_overrides(config, seed=args.seed, output=args.output)
            if getattr(args, "realizations", None) is not None:
                config["n_realizations"] = args.realizations
        return config, line_index

    def cmd_validate(self, args) -> int:
        config, line_index = self._load(args)
        issues = validate_config(config, args.target, line_index, args.threads or default_threads())
        if issues:
            self.show_issues(issues, args.config)
            return ConfigError(issues).exit_code
        self.console.print(f"[green]Configuração válida[/green] para {args.target}: {args.config}")
        return EXIT_OK

    def cmd_experiment(self, args) -> int:
        config, line_index = self._load(args)
        threads = args.threads or default_threads()
        with Progress(
            TextColumn("{task.description}"), BarColumn(), MofNCompleteColumn(), TimeElapsedColumn(),
            console=self.console, transient=True,
        ) as progress:
            task = progress.add_task(args.command, total=None)

            def on_progress(done: int, total: int, description: str):
                progress.update(task, completed=done, total=total, description=description)

            result = run_experiment(config, args.command, threads, line_index, progress_callback=on_progress)
        self.show_result(result)
        return EXIT_OK

    def cmd_alpha(self, args) -> int:
        output = args.output or f"alpha_{args.kind}_k{args.k}.json"
        path = dump_alpha(
            output, args.kind, k=args.k, d=args.d, m=args.m, t=args.t, n_pairs=args.n_pairs, N_A=args.n_a,
        )
        self.console.print(f"Tabela α gravada em {path}")
        return EXIT_OK

    def run(self, argv: Optional[List[str]] = None) -> int:
        """Executa a aplicação e devolve o código de saída."""
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as e:
            return int(e.code or 0) if e.code in (0, None) else 2
        setup_logging(args.log_level, args.log_file)

        handlers = {"validate": self.cmd_validate, "alpha": self.cmd_alpha}
        try:
            return handlers.get(args.command, self.cmd_experiment)(args)
        except ConfigError as e:
            self.show_issues(e.issues, getattr(args, "config", "-"))
            return e.exit_code
        except MSPEError as e:
            logger.error("%s: %s", type(e).__name__, e)
            return e.exit_code
        except KeyboardInterrupt:
            logger.warning("Execução interrompida pelo usuário")
            return EXIT_FAILURE
        except Exception as e:
            logger.exception("Erro fatal na aplicação: %s", e)
            return EXIT_FAILURE


def main(argv: Optional[List[str]] = None) -> int:
    """Função principal."""
    app = MSPELabApp()
    return app.run(argv)


if __name__ == "__main__":
    sys.exit(main())
