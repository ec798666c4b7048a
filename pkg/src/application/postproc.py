"""
Pós-processamento - Normas de erro, melhor aproximação L2 e diagnósticos da norma tripla
Versão: 1.0
Data: 2026-10-15

Os erros usam o u1 discreto descontínuo no tempo, amostrado dentro das fatias
e nos traços laterais dos nós temporais.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Dict, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from application.assembly import SaddlePointAssembler, SaddleSystem, SpatialForms, space_time_load
from domain.fe_space import DiscreteField, SpaceTimeSpace
from domain.problem_def import ExactSolution
from domain.quadrature import elevated_rule, gauss_rule
from infrastructure.errors import SpaceError

logger = logging.getLogger(__name__)

Region = Optional[Sequence[Sequence[Sequence[float]]]]


class RegionSampler:
    """Quadratura elevada sobre as células de uma região (união de caixas) ou de Omega"""

    def __init__(self, space: SpaceTimeSpace, region: Region = None):
        spatial = space.spatial
        mesh = spatial.mesh
        self.space = space
        if region is None:
            self.cells = np.arange(mesh.n_cells)
        else:
            self.cells = np.flatnonzero(mesh.cells_in_boxes(region))
        if self.cells.size == 0:
            raise SpaceError(f"Região sem células da malha: {region}")
        rule = elevated_rule(mesh.dim, spatial.degree)
        self.values = spatial.tabulate(rule.points).values  # (nq, nloc)
        phys = mesh.cell_origins[self.cells, None, :] + rule.points[None] * mesh.cell_sizes[self.cells, None, :]
        self.points = phys.reshape(-1, mesh.dim)
        self.weights = (mesh.cell_measures[self.cells][:, None] * rule.weights[None, :]).ravel()
        self.dofs = spatial.cell_dofs[self.cells]

    def discrete_values(self, coeffs: np.ndarray) -> np.ndarray:
        """Valores de uma função espacial (n_dofs,) nos pontos de quadratura"""
        return (coeffs[self.dofs] @ self.values.T).ravel()

    def l2_squared(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values**2))


def _time_samples(time_degree: int) -> np.ndarray:
    """q+2 pontos de Gauss de cada fatia mais os dois extremos"""
    inner = gauss_rule(time_degree + 2).points[:, 0]
    return np.concatenate([[0.0], inner, [1.0]])


def error_linfty_l2(u1: DiscreteField, exact: ExactSolution, region: Region = None) -> float:
    """
    max_t ||u - u1(t)||_{L2(region)} sobre a amostra temporal das fatias

    Args:
        u1: campo primal discreto
        exact: solução de referência
        region: caixas da região de erro (None = Omega)

    Returns:
        Erro L-infinito(L2)
    """
    space = u1.space
    sampler = RegionSampler(space, region)
    samples = _time_samples(space.time_degree)
    basis = space.time_basis.evaluate(samples)
    worst = 0.0
    for n in range(space.n_slabs):
        t0, _ = space.partition.slab_interval(n)
        coeffs = u1.slab_coefficients(n)
        for tau, theta in zip(samples, basis):
            t = t0 + tau * space.partition.dt
            diff = sampler.discrete_values(theta @ coeffs) - exact.value(t, sampler.points)
            worst = max(worst, sampler.l2_squared(diff))
    return float(np.sqrt(worst))


def error_l2_l2_dt(u1: DiscreteField, exact: ExactSolution, region: Region = None) -> float:
    """||d_t (u - u1)||_{L2(0,T; L2(region))} com a derivada interior a cada fatia"""
    space = u1.space
    dt = space.partition.dt
    sampler = RegionSampler(space, region)
    t_rule = gauss_rule(min(space.time_degree + 6, 20))
    dbasis = space.time_basis.evaluate(t_rule.points[:, 0], 1) / dt
    total = 0.0
    for n in range(space.n_slabs):
        t0, _ = space.partition.slab_interval(n)
        coeffs = u1.slab_coefficients(n)
        for m, tau in enumerate(t_rule.points[:, 0]):
            diff = sampler.discrete_values(dbasis[m] @ coeffs) - exact.dt(t0 + tau * dt, sampler.points)
            total += dt * t_rule.weights[m] * sampler.l2_squared(diff)
    return float(np.sqrt(total))


def error_l2_at_time(
    u1: DiscreteField,
    exact: ExactSolution,
    t: float,
    region: Region = None,
    relative: bool = False,
    side: str = "right",
) -> float:
    """Erro L2(region) de u1 no instante t (traço escolhido por side); relativo a ||u(t)|| se pedido"""
    space = u1.space
    sampler = RegionSampler(space, region)
    n, tau = space.partition.locate(t, side)
    coeffs = space.time_values(tau) @ u1.slab_coefficients(n)
    reference = exact.value(t, sampler.points)
    error = np.sqrt(sampler.l2_squared(sampler.discrete_values(coeffs) - reference))
    if relative:
        norm = np.sqrt(sampler.l2_squared(reference))
        return float(error / norm) if norm > 0 else float(error)
    return float(error)


def best_approximation(exact: ExactSolution, space: SpaceTimeSpace, label: str = "u1") -> DiscreteField:
    """
    Projeção L2 espaço-tempo fatia a fatia sobre P^q(I_n) x V_h^k

    Na fatia, a matriz de massa é kron(T_massa, M), logo C = T_massa^-1 R M^-1.
    """
    spatial = space.spatial
    forms = SpatialForms(spatial, spatial, np.ones(spatial.mesh.n_cells))
    mass = forms.mass()
    mass_lu = splu(sp.csc_matrix(0.5 * (mass + mass.T)))
    rule = gauss_rule(space.time_degree + 2)
    theta = space.time_basis.evaluate(rule.points[:, 0])
    time_mass = space.partition.dt * (theta.T * rule.weights) @ theta
    load = space_time_load(space, exact.value, np.arange(spatial.mesh.n_cells))
    blocks = []
    for n in range(space.n_slabs):
        left = np.linalg.solve(time_mass, load[n])  # (q+1, n_espacial)
        coeffs = mass_lu.solve(np.ascontiguousarray(left.T)).T
        blocks.append(coeffs.ravel())
    return DiscreteField(space, blocks, label)


@dataclass(frozen=True)
class TNormComponents:
    """Quadrados das parcelas da norma tripla discreta"""

    s_h: float
    jump: float
    omega: float
    dual: float

    @property
    def total(self) -> float:
        return self.s_h + self.jump + self.omega + self.dual

    def norms(self) -> Dict[str, float]:
        """Parcelas como normas (raiz quadrada, truncando ruído negativo de arredondamento)"""
        return {name: float(np.sqrt(max(value, 0.0))) for name, value in asdict(self).items()}


def _quadratic(matrix: sp.spmatrix, x: np.ndarray) -> float:
    return float(x @ (matrix @ x))


def tnorm_components(system: SaddleSystem, primal: np.ndarray, dual: np.ndarray) -> TNormComponents:
    """
    |U|^2_{S_h}, |U|^2_{saltos}, ||u1||^2_{omega_T} e ||Z||^2_{S*} via os blocos montados

    Args:
        system: sistema montado (fornece os blocos nomeados)
        primal: vetor primal U (u1, u2 fatia a fatia)
        dual: vetor dual Z
    """
    blocks = system.blocks
    return TNormComponents(
        s_h=_quadratic(blocks["S_h"], primal),
        jump=_quadratic(blocks["S_jump"], primal),
        omega=_quadratic(blocks["data"], primal),
        dual=_quadratic(blocks["S_dual"], dual),
    )


def tnorm_strong_components(assembler: SaddlePointAssembler, primal: np.ndarray) -> Dict[str, float]:
    """Termos adicionais da norma fortalecida (quadrados)"""
    return {name: _quadratic(matrix, primal) for name, matrix in assembler.strong_norm_matrices().items()}


def split_solution(system: SaddleSystem, x: np.ndarray):
    """Separa o vetor global em (U, Z) na ordem por blocos"""
    return system.layout.to_blocks(x)
