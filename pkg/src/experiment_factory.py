"""
Factory de Experimentos - Monta malha, espaços e montador a partir de um RunConfig
Versão: 1.0
Data: 2026-10-15
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Tuple

import numpy as np

from application.assembly import SaddlePointAssembler, StabilizationWeights
from domain.fe_space import SpaceTimeSpace, SpatialSpace
from domain.mesh_geometry import Mesh, TimePartition, build_mesh_1d, build_mesh_2d, build_time_partition
from domain.problem_def import (
    DataDomain,
    ExactSolution,
    ObservedData,
    PolynomialSolution,
    WaveSpeedModel,
    ZeroSolution,
    exact_multijump,
    exact_simple,
    multijump_p2,
    sample_data,
)
from dto.run_config import RunConfig, SolutionKind
from infrastructure.errors import ConfigurationError

SolutionBuilder = Callable[[RunConfig], Tuple[ExactSolution, WaveSpeedModel]]


@dataclass
class ProblemSetup:
    """Objetos discretos de uma execução, prontos para montagem"""

    config: RunConfig
    mesh: Mesh
    partition: TimePartition
    speed: WaveSpeedModel
    exact: ExactSolution
    omega: DataDomain
    data: ObservedData
    primal: SpaceTimeSpace
    dual: SpaceTimeSpace
    assembler: SaddlePointAssembler


def _simple(config: RunConfig) -> Tuple[ExactSolution, WaveSpeedModel]:
    speed = WaveSpeedModel(interfaces=(0.5,), speeds=(config.c1, config.c2))
    return exact_simple(config.c1, config.c2, config.w1), speed


def _multijump(config: RunConfig) -> Tuple[ExactSolution, WaveSpeedModel]:
    exact = exact_multijump(config.p1, config.n_wave, config.c1, config.c2, config.w1)
    p2 = multijump_p2(config.p1, config.n_wave, config.c1, config.c2, config.w1)
    speed = WaveSpeedModel(interfaces=(config.p1, p2), speeds=(config.c1, config.c2, config.c1))
    return exact, speed


def _zero(config: RunConfig) -> Tuple[ExactSolution, WaveSpeedModel]:
    return ZeroSolution(), WaveSpeedModel(interfaces=(0.5,), speeds=(config.c1, config.c2))


def _polynomial(config: RunConfig) -> Tuple[ExactSolution, WaveSpeedModel]:
    speed = WaveSpeedModel(interfaces=(0.5,), speeds=(config.c1, config.c2))
    return PolynomialSolution(speed), speed


class ExperimentFactory:
    """Factory que traduz configurações em problemas discretos"""

    def __init__(self):
        self.solutions: Dict[str, SolutionBuilder] = {
            SolutionKind.SIMPLE.value: _simple,
            SolutionKind.MULTIJUMP.value: _multijump,
            SolutionKind.ZERO.value: _zero,
            SolutionKind.POLYNOMIAL.value: _polynomial,
        }
        self.logger = logging.getLogger(__name__)

    def create_solution(self, config: RunConfig) -> Tuple[ExactSolution, WaveSpeedModel]:
        """Cria a solução de referência e o modelo de velocidade correspondente"""
        builder = self.solutions.get(config.solution)
        if builder is None:
            raise ConfigurationError(f"Solução não registrada: {config.solution}")
        return builder(config)

    def create_mesh(self, config: RunConfig, speed: WaveSpeedModel, omega: DataDomain) -> Mesh:
        """Malha ajustada às interfaces, a omega e à região de erro"""
        if config.dimension == 2:
            return build_mesh_2d(config.level)
        required = set(speed.interfaces) | set(omega.breakpoints())
        if config.error_region:
            required |= set(DataDomain.from_lists(config.error_region).breakpoints())
        return build_mesh_1d(config.level, sorted(required))

    def build_problem(self, config: RunConfig) -> ProblemSetup:
        """
        Monta todos os objetos discretos de uma execução

        Args:
            config: configuração validada

        Returns:
            ProblemSetup com espaços primal/dual e montador prontos
        """
        config.validate()
        exact, speed = self.create_solution(config)
        omega = DataDomain.from_lists(config.resolved_omega)
        mesh = self.create_mesh(config, speed, omega)
        partition = build_time_partition(config.final_time, config.slab_count(mesh.h))

        primal = SpaceTimeSpace(SpatialSpace(mesh, config.k), partition, config.q)
        dual_spatial = primal.spatial
        if config.resolved_k_dual != config.k:
            dual_spatial = SpatialSpace(mesh, config.resolved_k_dual)
        dual = SpaceTimeSpace(dual_spatial, partition, config.resolved_q_dual)

        weights = StabilizationWeights(
            data=config.gamma_data,
            primal=config.gamma_primal,
            dual=config.gamma_dual,
            jump=config.gamma_jump,
            boundary=config.nitsche_penalty,
        )
        assembler = SaddlePointAssembler(
            primal, dual, speed.csq_per_cell(mesh), omega.indicator(mesh), weights
        )
        self.logger.info(
            f"{config.name}: {config.dimension}D L={config.level} k={config.k} q={config.q} "
            f"N={partition.n_slabs} dt={partition.dt:.4g} c1={config.c1}"
        )
        return ProblemSetup(
            config=config,
            mesh=mesh,
            partition=partition,
            speed=speed,
            exact=exact,
            omega=omega,
            data=sample_data(exact, omega),
            primal=primal,
            dual=dual,
            assembler=assembler,
        )

    def get_supported_solutions(self) -> Dict[str, str]:
        """Retorna as soluções de referência suportadas"""
        return {
            SolutionKind.SIMPLE.value: "Onda estacionária com uma interface em x = 0.5",
            SolutionKind.MULTIJUMP.value: "Duas interfaces p1 < p2 (1D)",
            SolutionKind.ZERO.value: "Solução nula (verificação)",
            SolutionKind.POLYNOMIAL.value: "u = t phi(x), contida no espaço discreto",
        }

    def get_solution_info(self, config: RunConfig) -> Dict[str, Any]:
        """Resumo da solução e do modelo de velocidade de uma configuração"""
        exact, speed = self.create_solution(config)
        return {
            "solution": config.solution,
            "description": self.get_supported_solutions()[config.solution],
            "interfaces": list(speed.interfaces),
            "speeds": list(speed.speeds),
            "contrast": float(np.max(speed.speeds) / np.min(speed.speeds)),
            "exact_class": exact.__class__.__name__,
        }
