"""
Executor de experimentos - execução única, varreduras em h e em contraste, GCC e perfis
Versão: 1.0
Data: 2026-10-15
"""

import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from rich.console import Console
from rich.progress import Progress, SpinnerColumn, TextColumn
from scipy.stats import linregress

from application.assembly import SaddleSystem, dump_matrix
from application.postproc import (
    best_approximation,
    error_l2_at_time,
    error_l2_l2_dt,
    error_linfty_l2,
    split_solution,
    tnorm_components,
    tnorm_strong_components,
)
from application.solver import factor, solve_with_residual
from domain.fe_space import DiscreteField, evaluate
from domain.problem_def import DataDomain, GCCReport, gcc_threshold
from dto.error_report import ErrorReport, SweepResult
from dto.run_config import RunConfig
from experiment_factory import ExperimentFactory, ProblemSetup
from infrastructure.errors import ConfigurationError, SingularSystemError, WaveUCError

# Contraste: T adaptado fica logo acima de 0.25 (1 + 1/c1)
ADAPTED_TIME_MARGIN = 0.01


@dataclass
class SolvedRun:
    """Problema montado, solução e campos separados"""

    setup: ProblemSetup
    system: SaddleSystem
    solution: np.ndarray
    fields: Dict[str, DiscreteField]
    residual: float
    elapsed: float


def run_label(config: RunConfig) -> str:
    return f"{config.name}_L{config.level}_k{config.k}_c{config.c1:g}"


def adapted_final_time(c1: float, margin: float = ADAPTED_TIME_MARGIN) -> float:
    """T que cumpre por pouco o limiar 0.25 (1 + 1/c1) da solução simples"""
    return 0.25 * (1.0 + 1.0 / c1) + margin


class ExperimentRunner:
    """Compõe malha, espaços, montagem, solução e erros; organiza as varreduras"""

    def __init__(
        self,
        console: Optional[Console] = None,
        max_workers: int = 4,
        parallel: bool = True,
        dump_directory: Optional[Path] = None,
    ):
        self.factory = ExperimentFactory()
        self.console = console or Console()
        self.max_workers = max(1, max_workers)
        self.parallel = parallel
        self.dump_directory = dump_directory
        self.logger = logging.getLogger(__name__)
        self._lock = threading.Lock()

    # -- execução única -----------------------------------------------------

    def solve(self, config: RunConfig) -> SolvedRun:
        """malha -> espaços -> montagem -> fatoração -> solução"""
        label = run_label(config)
        start = time.perf_counter()
        try:
            setup = self.factory.build_problem(config)
            system = setup.assembler.assemble_system(setup.data, setup.exact.value)
            if self.dump_directory is not None:
                dump_matrix(system.matrix, Path(self.dump_directory) / f"{label}_matrix.txt")
            slab_size = system.layout.slab_size if config.resolved_solver == "slabwise" else None
            fact = factor(system.matrix, slab_size=slab_size)
            if fact.inertia is not None and fact.inertia != (system.layout.n_primal, system.layout.n_dual, 0):
                self.logger.warning(f"{label}: inércia {fact.inertia} difere de (n_primal, n_dual, 0)")
            x, residual = solve_with_residual(fact, system.rhs)
        except SingularSystemError as e:
            raise SingularSystemError(f"run {label}: {e}") from e
        except WaveUCError as e:
            raise type(e)(f"run {label}: {e}") from e
        fields = system.layout.split(x, setup.primal, setup.dual)
        elapsed = time.perf_counter() - start
        self.logger.info(f"{label}: resíduo {residual:.2e}, {system.size} incógnitas, {elapsed:.2f}s")
        return SolvedRun(setup, system, x, fields, residual, elapsed)

    def run_single(self, config: RunConfig) -> ErrorReport:
        """
        Execução completa com erros contra a solução exata

        Args:
            config: configuração validada

        Returns:
            ErrorReport com erros, melhor aproximação, norma tripla e resíduo
        """
        run = self.solve(config)
        setup = run.setup
        exact = setup.exact
        region = config.error_region
        u1 = run.fields["u1"]
        best = best_approximation(exact, setup.primal)

        primal, dual = split_solution(run.system, run.solution)
        tnorm = tnorm_components(run.system, primal, dual).norms()
        strong = {
            name: float(np.sqrt(max(value, 0.0)))
            for name, value in tnorm_strong_components(setup.assembler, primal).items()
        }
        gcc_time = None
        if config.dimension == 1:
            gcc_time = gcc_threshold(setup.speed, setup.omega).t_min

        return ErrorReport(
            label=run_label(config),
            level=config.level,
            order=config.k,
            contrast=config.c1 / config.c2,
            final_time=config.final_time,
            n_slabs=setup.partition.n_slabs,
            n_dofs=run.system.size,
            linfty_l2_u=error_linfty_l2(u1, exact, region),
            l2_l2_ut=error_l2_l2_dt(u1, exact, region),
            best_linfty_l2_u=error_linfty_l2(best, exact, region),
            best_l2_l2_ut=error_l2_l2_dt(best, exact, region),
            t0_l2=error_l2_at_time(u1, exact, 0.0, region, side="right"),
            tnorm=tnorm,
            tnorm_strong=strong,
            residual=run.residual,
            gcc_time=gcc_time,
            elapsed=run.elapsed,
        )

    # -- varreduras ---------------------------------------------------------

    def _run_batch(self, configs: List[RunConfig], description: str) -> List[ErrorReport]:
        """Executa configurações independentes (em paralelo se habilitado)"""
        reports: List[ErrorReport] = []

        def run_one(config: RunConfig) -> ErrorReport:
            report = self.run_single(config)
            with self._lock:
                self.console.print(
                    f"✓ {report.label} - erro L∞L2 {report.linfty_l2_u:.3e}, resíduo {report.residual:.1e}"
                )
            return report

        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            console=self.console,
        ) as progress:
            task = progress.add_task(description, total=len(configs))
            if self.parallel and len(configs) > 1:
                with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
                    futures = {executor.submit(run_one, c): c for c in configs}
                    for future in as_completed(futures):
                        reports.append(future.result())
                        progress.advance(task)
            else:
                for config in configs:
                    reports.append(run_one(config))
                    progress.advance(task)
        return reports

    def run_refinement_sweep(self, config: RunConfig, levels: Sequence[int]) -> SweepResult:
        """Uma execução por nível L; ordens observadas entre níveis consecutivos"""
        levels = list(levels)
        if levels != sorted(levels) or len(set(levels)) != len(levels):
            raise ConfigurationError(f"Níveis devem ser crescentes e distintos: {levels}")
        configs = [config.with_overrides(level=level).validate() for level in levels]
        result = SweepResult(kind="refinement", reports=self._run_batch(configs, "Refinando malha..."))
        result.compute_orders()
        return result

    def run_contrast_sweep(
        self, config: RunConfig, contrasts: Sequence[float], adapt_time: bool = False
    ) -> SweepResult:
        """
        Uma execução por c1 em L e k fixos

        Args:
            config: configuração base
            contrasts: valores de c1
            adapt_time: se True, T = 0.25 (1 + 1/c1) + margem em cada execução

        Returns:
            SweepResult com inclinações log-log do erro (e da razão erro/melhor aproximação) em c1
        """
        configs = []
        for c1 in contrasts:
            overrides = {"c1": float(c1)}
            if adapt_time:
                overrides["final_time"] = adapted_final_time(float(c1))
            configs.append(config.with_overrides(**overrides).validate())
        result = SweepResult(kind="contrast", reports=self._run_batch(configs, "Variando contraste..."))
        result.slopes = contrast_slopes(result)
        return result

    # -- consultas ----------------------------------------------------------

    def gcc_query(self, config: RunConfig) -> GCCReport:
        """Limiar T_min para o modelo de velocidade e omega da configuração"""
        _, speed = self.factory.create_solution(config)
        return gcc_threshold(speed, DataDomain.from_lists(config.resolved_omega))

    def error_at_time(self, config: RunConfig, t: float, relative: bool = True) -> float:
        """Erro L2(Omega) de u1 em t (comparações com e sem GCC da solução multijump)"""
        run = self.solve(config)
        return error_l2_at_time(run.fields["u1"], run.setup.exact, t, None, relative)

    def export_profile(self, config: RunConfig, t: float, n_points: int = 201) -> pd.DataFrame:
        """
        Perfil de u1 e d_t u1 no instante t ao longo de x (em y = 0.5 no caso 2D)

        Returns:
            DataFrame com colunas x, y, y_dt, L, y_exact, y_dt_exact
        """
        run = self.solve(config)
        xs = np.linspace(0.0, 1.0, n_points)
        points = xs[:, None] if config.dimension == 1 else np.column_stack([xs, np.full_like(xs, 0.5)])
        u1 = run.fields["u1"]
        exact = run.setup.exact
        return pd.DataFrame(
            {
                "x": xs,
                "y": evaluate(u1, t, points),
                "y_dt": evaluate(u1, t, points, "d_t"),
                "L": config.level,
                "y_exact": exact.value(t, points),
                "y_dt_exact": exact.dt(t, points),
            }
        )


def contrast_slopes(result: SweepResult) -> Dict[str, float]:
    """Inclinações de mínimos quadrados de log(erro) contra log(c1)"""
    contrasts = np.log([r.contrast for r in result.reports])
    series: Dict[str, Callable[[ErrorReport], float]] = {
        "L-infty-L2-error-u": lambda r: r.linfty_l2_u,
        "L2-L2-error-u_t": lambda r: r.l2_l2_ut,
        "bestapprox-L-infty-L2-error-u": lambda r: r.best_linfty_l2_u,
        "bestapprox-L2-L2-error-u_t": lambda r: r.best_l2_l2_ut,
        "ratio": lambda r: r.error_ratio,
    }
    slopes = {}
    for name, getter in series.items():
        values = np.array([getter(r) for r in result.reports], dtype=float)
        if len(values) < 2 or np.any(~np.isfinite(values)) or np.any(values <= 0):
            slopes[name] = float("nan")
            continue
        slopes[name] = float(linregress(contrasts, np.log(values)).slope)
    return slopes
