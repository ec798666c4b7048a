"""
Espaços de elementos finitos espaço-tempo
Versão: 1.0
Data: 2026-10-13

Lagrange contínuo de grau k no espaço (P^k em intervalos, Q^k em quadriláteros)
e polinômios descontínuos de grau q em cada fatia temporal.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, List, Tuple

import numpy as np
from numpy.polynomial import polynomial as P
from numpy.polynomial.legendre import Legendre

from domain.mesh_geometry import Mesh, TimePartition
from infrastructure.errors import SpaceError

logger = logging.getLogger(__name__)

FIELD_LABELS = ("u1", "u2", "z1", "z2")

# f(t, x) -> valores nos pontos x com shape (m, d)
SpaceTimeFunction = Callable[[float, np.ndarray], np.ndarray]


def lobatto_nodes(degree: int) -> np.ndarray:
    """Pontos de Gauss-Lobatto em [0,1]: extremos mais as raízes de P_k' (Legendre)"""
    if degree == 0:
        return np.array([0.5])
    interior = Legendre.basis(degree).deriv().roots() if degree > 1 else np.array([])
    return np.concatenate([[0.0], np.sort(0.5 * (np.real(interior) + 1.0)), [1.0]])


class LagrangeBasis1D:
    """Base nodal de Lagrange em [0,1] nos pontos de Gauss-Lobatto (ponto médio para grau 0)"""

    def __init__(self, degree: int):
        if degree < 0:
            raise SpaceError(f"Grau polinomial negativo: {degree}")
        self.degree = degree
        self.nodes = lobatto_nodes(degree)
        # coluna j = coeficientes monomiais da função de base j
        self._coeffs = np.linalg.inv(P.polyvander(self.nodes, degree))

    @property
    def size(self) -> int:
        return self.degree + 1

    def evaluate(self, x: np.ndarray, derivative: int = 0) -> np.ndarray:
        """Tabela (len(x), size) das funções de base (ou derivadas) nos pontos x"""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if derivative > self.degree:
            return np.zeros((x.size, self.size))
        coeffs = P.polyder(self._coeffs, m=derivative, axis=0) if derivative else self._coeffs
        return P.polyvander(x, self.degree - derivative) @ coeffs


@dataclass(frozen=True)
class Tabulation:
    """Funções de base locais avaliadas em pontos de referência"""

    values: np.ndarray  # (nq, nloc)
    grads: np.ndarray  # (dim, nq, nloc) derivadas de referência
    second: np.ndarray  # (dim, nq, nloc) derivadas segundas puras de referência


def _tensor(tables: List[np.ndarray]) -> np.ndarray:
    """Produto tensorial ponto a ponto; o índice local do eixo x varia mais rápido"""
    if len(tables) == 1:
        return tables[0]
    tx, ty = tables
    return np.einsum("qa,qb->qba", tx, ty).reshape(tx.shape[0], -1)


class SpatialSpace:
    """Espaço V_h^k contínuo sobre uma malha cartesiana"""

    def __init__(self, mesh: Mesh, degree: int):
        if degree < 1:
            raise SpaceError(f"Grau espacial deve ser >= 1: {degree}")
        self.mesh = mesh
        self.degree = degree
        self.dim = mesh.dim
        self.basis = LagrangeBasis1D(degree)
        self.n_local = (degree + 1) ** self.dim
        self.cell_dofs, self.n_dofs = self._number_dofs()

    def _number_dofs(self) -> Tuple[np.ndarray, int]:
        k = self.degree
        local = np.arange(k + 1)
        if self.dim == 1:
            cells = np.arange(self.mesh.n_cells)
            dofs = cells[:, None] * k + local[None, :]
            return dofs, self.mesh.n_cells * k + 1
        nx = len(self.mesh.x_vertices) - 1
        ny = len(self.mesh.y_vertices) - 1
        row = nx * k + 1
        a, b = np.meshgrid(local, local, indexing="xy")  # índice local a + b*(k+1)
        i = self.mesh.cells[:, 0][:, None]
        j = self.mesh.cells[:, 1][:, None]
        dofs = (i * k + a.ravel()[None, :]) + (j * k + b.ravel()[None, :]) * row
        return dofs, row * (ny * k + 1)

    @cached_property
    def dof_coordinates(self) -> np.ndarray:
        """Coordenadas (n_dofs, dim) dos nós de Lagrange"""
        ref = self.reference_nodes()
        coords = np.zeros((self.n_dofs, self.dim))
        phys = self.mesh.cell_origins[:, None, :] + ref[None, :, :] * self.mesh.cell_sizes[:, None, :]
        coords[self.cell_dofs.ravel()] = phys.reshape(-1, self.dim)
        return coords

    def reference_nodes(self) -> np.ndarray:
        nodes = self.basis.nodes
        if self.dim == 1:
            return nodes[:, None]
        a, b = np.meshgrid(nodes, nodes, indexing="xy")
        return np.column_stack([a.ravel(), b.ravel()])

    def tabulate(self, ref_points: np.ndarray) -> Tabulation:
        """
        Avalia a base local nos pontos de referência

        Args:
            ref_points: array (nq, dim) em [0,1]^dim

        Returns:
            Tabulation com valores, gradientes e derivadas segundas de referência
        """
        ref_points = np.atleast_2d(ref_points)
        e = [self.basis.evaluate(ref_points[:, d], 0) for d in range(self.dim)]
        de = [self.basis.evaluate(ref_points[:, d], 1) for d in range(self.dim)]
        he = [self.basis.evaluate(ref_points[:, d], 2) for d in range(self.dim)]
        values = _tensor(e)
        grads, second = [], []
        for d in range(self.dim):
            grads.append(_tensor([de[a] if a == d else e[a] for a in range(self.dim)]))
            second.append(_tensor([he[a] if a == d else e[a] for a in range(self.dim)]))
        return Tabulation(values=values, grads=np.stack(grads), second=np.stack(second))

    def evaluate(self, coeffs: np.ndarray, points: np.ndarray, derivative: str = "value") -> np.ndarray:
        """
        Avalia uma função espacial do espaço em pontos físicos

        Args:
            coeffs: vetor (n_dofs,)
            points: array (m, dim)
            derivative: 'value', 'grad_x' ou 'laplacian'

        Returns:
            (m,) para valor/laplaciano, (m, dim) para gradiente
        """
        cells, ref = self.mesh.locate(points)
        local = coeffs[self.cell_dofs[cells]]  # (m, nloc)
        tab = self.tabulate(ref)
        sizes = self.mesh.cell_sizes[cells]  # (m, dim)
        if derivative == "value":
            return np.einsum("pl,pl->p", tab.values, local)
        if derivative == "grad_x":
            return np.einsum("dpl,pl->pd", tab.grads, local) / sizes
        if derivative == "laplacian":
            return np.sum(np.einsum("dpl,pl->pd", tab.second, local) / sizes**2, axis=1)
        raise SpaceError(f"Derivada desconhecida: {derivative}")


@dataclass(frozen=True)
class SlabSpace:
    """P^q(I_n) x V_h^k numa fatia; índice local = nó_temporal * n_espacial + dof_espacial"""

    spatial: SpatialSpace
    time_degree: int
    slab: int

    @property
    def n_dofs(self) -> int:
        return (self.time_degree + 1) * self.spatial.n_dofs


class SpaceTimeSpace:
    """W_h^{k,q}: produto das fatias sobre a partição temporal"""

    def __init__(self, spatial: SpatialSpace, partition: TimePartition, time_degree: int):
        if time_degree < 0:
            raise SpaceError(f"Grau temporal negativo: {time_degree}")
        self.spatial = spatial
        self.partition = partition
        self.time_degree = time_degree
        self.time_basis = LagrangeBasis1D(time_degree)

    @property
    def n_slabs(self) -> int:
        return self.partition.n_slabs

    @property
    def slab_size(self) -> int:
        return (self.time_degree + 1) * self.spatial.n_dofs

    @property
    def n_dofs(self) -> int:
        return self.n_slabs * self.slab_size

    def slabs(self) -> List[SlabSpace]:
        return [SlabSpace(self.spatial, self.time_degree, n) for n in range(self.n_slabs)]

    def time_values(self, tau: float, derivative: int = 0) -> np.ndarray:
        """Base temporal em tau; derivadas já escaladas por 1/dt"""
        vals = self.time_basis.evaluate(np.array([tau]), derivative)[0]
        return vals / self.partition.dt**derivative


@dataclass
class DiscreteField:
    """Coeficientes de um campo escalar (u1, u2, z1 ou z2), um bloco por fatia"""

    space: SpaceTimeSpace
    blocks: List[np.ndarray]
    label: str = "u1"

    def __post_init__(self):
        if self.label not in FIELD_LABELS:
            raise SpaceError(f"Rótulo de campo desconhecido: {self.label}")
        if len(self.blocks) != self.space.n_slabs:
            raise SpaceError(f"Esperados {self.space.n_slabs} blocos, recebidos {len(self.blocks)}")
        for block in self.blocks:
            if block.shape != (self.space.slab_size,):
                raise SpaceError(f"Bloco com shape {block.shape}, esperado ({self.space.slab_size},)")

    @classmethod
    def zeros(cls, space: SpaceTimeSpace, label: str = "u1") -> "DiscreteField":
        return cls(space, [np.zeros(space.slab_size) for _ in range(space.n_slabs)], label)

    @classmethod
    def from_vector(cls, space: SpaceTimeSpace, vector: np.ndarray, label: str = "u1") -> "DiscreteField":
        blocks = [np.array(b) for b in np.asarray(vector).reshape(space.n_slabs, space.slab_size)]
        return cls(space, blocks, label)

    def to_vector(self) -> np.ndarray:
        return np.concatenate(self.blocks)

    def slab_coefficients(self, n: int) -> np.ndarray:
        """Coeficientes da fatia n como matriz (q+1, n_espacial)"""
        return self.blocks[n].reshape(self.space.time_degree + 1, self.space.spatial.n_dofs)

    def scaled(self, alpha: float) -> "DiscreteField":
        return DiscreteField(self.space, [alpha * b for b in self.blocks], self.label)


def _as_points(x, dim: int) -> Tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 0 or (arr.ndim == 1 and dim > 1 and arr.size == dim)
    return arr.reshape(-1, dim), single


def evaluate(field: DiscreteField, t: float, x, derivative: str = "value", side: str = "right"):
    """
    Avalia um campo discreto em (t, x)

    Args:
        field: campo discreto
        t: instante; em nós temporais o traço é escolhido por side
        x: ponto (escalar em 1D, par em 2D) ou array (m, dim)
        derivative: 'value', 'grad_x' ou 'd_t'
        side: 'left' ou 'right'

    Returns:
        Valor (ou vetor gradiente) no ponto; arrays para vários pontos
    """
    space = field.space
    n, tau = space.partition.locate(t, side)
    points, single = _as_points(x, space.spatial.dim)
    coeffs = field.slab_coefficients(n)
    if derivative == "d_t":
        spatial_coeffs = space.time_values(tau, 1) @ coeffs
        result = space.spatial.evaluate(spatial_coeffs, points, "value")
    elif derivative in ("value", "grad_x"):
        spatial_coeffs = space.time_values(tau, 0) @ coeffs
        result = space.spatial.evaluate(spatial_coeffs, points, derivative)
    else:
        raise SpaceError(f"Derivada desconhecida: {derivative}")
    return result[0] if single else result


def trace_jump(field: DiscreteField, n: int, x, which: str = "value"):
    """Salto ⟦v^n⟧ = v(t_n^+) - v(t_n^-) num nó temporal interno"""
    space = field.space
    if not 1 <= n <= space.n_slabs - 1:
        raise SpaceError(f"Nó temporal {n} fora de 1..{space.n_slabs - 1}")
    if which not in ("value", "grad_x"):
        raise SpaceError(f"Traço desconhecido: {which}")
    points, single = _as_points(x, space.spatial.dim)
    right = space.time_values(0.0) @ field.slab_coefficients(n)
    left = space.time_values(1.0) @ field.slab_coefficients(n - 1)
    result = space.spatial.evaluate(right - left, points, which)
    return result[0] if single else result


def interpolate(f: SpaceTimeFunction, space: SpaceTimeSpace, label: str = "u1") -> DiscreteField:
    """Interpolante nodal de f em cada fatia"""
    coords = space.spatial.dof_coordinates
    taus = space.time_basis.nodes
    blocks = []
    for n in range(space.n_slabs):
        t0, _ = space.partition.slab_interval(n)
        rows = [np.asarray(f(t0 + tau * space.partition.dt, coords), dtype=float) for tau in taus]
        blocks.append(np.concatenate(rows))
    return DiscreteField(space, blocks, label)


def random_field(space: SpaceTimeSpace, rng: np.random.Generator, label: str = "u1") -> DiscreteField:
    return DiscreteField(space, [rng.standard_normal(space.slab_size) for _ in range(space.n_slabs)], label)
