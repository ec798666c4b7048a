"""
Geometria - Malhas 1D/2D ajustadas à interface e ao domínio de dados, partição temporal
Versão: 1.0
Data: 2026-10-12
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from infrastructure.errors import MeshError, SpaceError

logger = logging.getLogger(__name__)

# Tolerância para identificar coordenadas de vértices/linhas da grade
COORD_TOL = 1e-14

# Linhas que a malha 2D precisa conter: interface x=0.5 e bordas de [0.25,0.75]^2
FITTED_LINES_2D = (0.25, 0.5, 0.75)


@dataclass(frozen=True)
class Facet:
    """Faceta da malha (ponto em 1D, aresta alinhada aos eixos em 2D)"""

    index: int
    axis: int  # direção da normal: 0 = x, 1 = y
    position: float  # coordenada da faceta ao longo da normal
    span: Tuple[float, float]  # extensão tangencial (vazia em 1D)
    cells: Tuple[int, ...]  # (menos, mais) se interna; (célula,) se fronteira
    side: int = -1  # fronteira: 0 = face inferior da célula, 1 = face superior

    @property
    def is_interior(self) -> bool:
        return len(self.cells) == 2

    @property
    def measure(self) -> float:
        """Comprimento da aresta (2D) ou 1 para um ponto (1D)"""
        if self.span[1] > self.span[0]:
            return self.span[1] - self.span[0]
        return 1.0

    @property
    def outward_sign(self) -> float:
        """Sinal da normal exterior em facetas de fronteira"""
        return 1.0 if self.side == 1 else -1.0


class _CartesianMesh:
    """Funcionalidades comuns às malhas cartesianas (intervalos e quadriláteros)"""

    dim: int
    cell_origins: np.ndarray
    cell_sizes: np.ndarray
    interior_facets: List[Facet]
    boundary_facets: List[Facet]

    @property
    def n_cells(self) -> int:
        return self.cell_origins.shape[0]

    @property
    def cell_measures(self) -> np.ndarray:
        return np.prod(self.cell_sizes, axis=1)

    @property
    def cell_diameters(self) -> np.ndarray:
        """h_K: maior aresta da célula (comprimento em 1D)"""
        return np.max(self.cell_sizes, axis=1)

    @property
    def cell_centers(self) -> np.ndarray:
        return self.cell_origins + 0.5 * self.cell_sizes

    def facet_size(self, facet: Facet) -> float:
        """h_F: média dos diâmetros das células vizinhas"""
        return float(np.mean(self.cell_diameters[list(facet.cells)]))

    def facets_of_cell(self, cell: int) -> List[Facet]:
        return [f for f in self.interior_facets + self.boundary_facets if cell in f.cells]

    def cells_in_boxes(self, boxes: Sequence[Sequence[Tuple[float, float]]]) -> np.ndarray:
        """
        Indicador das células contidas numa união de caixas

        Args:
            boxes: lista de caixas, cada uma com um intervalo (lo, hi) por direção

        Returns:
            Vetor booleano por célula

        Raises:
            MeshError: se alguma célula cortar a fronteira de uma caixa
        """
        lo_cells = self.cell_origins
        hi_cells = self.cell_origins + self.cell_sizes
        inside = np.zeros(self.n_cells, dtype=bool)
        for box in boxes:
            lo = np.array([b[0] for b in box])
            hi = np.array([b[1] for b in box])
            contained = np.all((lo_cells >= lo - COORD_TOL) & (hi_cells <= hi + COORD_TOL), axis=1)
            overlap = np.all((lo_cells < hi - COORD_TOL) & (hi_cells > lo + COORD_TOL), axis=1)
            if np.any(overlap & ~contained):
                raise MeshError(f"Malha não ajustada à caixa {box}")
            inside |= contained
        return inside

    def locate(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Localiza pontos na malha

        Args:
            points: array (m, dim) de coordenadas

        Returns:
            Tupla (índices das células, coordenadas de referência em [0,1]^dim)
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.dim:
            raise SpaceError(f"Pontos de dimensão {points.shape[1]} numa malha {self.dim}D")
        if np.any(points < -COORD_TOL) or np.any(points > 1.0 + COORD_TOL):
            raise SpaceError("Ponto fora do domínio [0,1]^d")
        index = np.zeros(points.shape[0], dtype=int)
        ref = np.zeros_like(points)
        stride = 1
        for axis, grid in enumerate(self._grids()):
            n = len(grid) - 1
            i = np.clip(np.searchsorted(grid, points[:, axis], side="right") - 1, 0, n - 1)
            ref[:, axis] = np.clip((points[:, axis] - grid[i]) / (grid[i + 1] - grid[i]), 0.0, 1.0)
            index += i * stride
            stride *= n
        return index, ref

    def _grids(self) -> List[np.ndarray]:
        raise NotImplementedError


@dataclass(eq=False)
class Mesh1D(_CartesianMesh):
    """Malha do intervalo [0,1]"""

    vertices: np.ndarray
    cells: np.ndarray = field(init=False)
    interior_facets: List[Facet] = field(init=False)
    boundary_facets: List[Facet] = field(init=False)
    h: float = field(init=False)

    def __post_init__(self):
        self.dim = 1
        v = self.vertices
        n = len(v) - 1
        self.cells = np.column_stack([np.arange(n), np.arange(1, n + 1)])
        self.cell_origins = v[:-1, None].copy()
        self.cell_sizes = np.diff(v)[:, None]
        self.interior_facets = [
            Facet(index=i, axis=0, position=float(v[i]), span=(0.0, 0.0), cells=(i - 1, i))
            for i in range(1, n)
        ]
        self.boundary_facets = [
            Facet(index=0, axis=0, position=0.0, span=(0.0, 0.0), cells=(0,), side=0),
            Facet(index=n, axis=0, position=1.0, span=(0.0, 0.0), cells=(n - 1,), side=1),
        ]
        self.h = float(np.max(self.cell_sizes))

    def has_vertex(self, coord: float) -> bool:
        return bool(np.any(np.abs(self.vertices - coord) <= COORD_TOL))

    def _grids(self) -> List[np.ndarray]:
        return [self.vertices]


@dataclass(eq=False)
class Mesh2D(_CartesianMesh):
    """Malha tensorial de quadriláteros do quadrado unitário"""

    x_vertices: np.ndarray
    y_vertices: np.ndarray
    cells: np.ndarray = field(init=False)
    interior_facets: List[Facet] = field(init=False)
    boundary_facets: List[Facet] = field(init=False)
    h: float = field(init=False)

    def __post_init__(self):
        self.dim = 2
        xv, yv = self.x_vertices, self.y_vertices
        nx, ny = len(xv) - 1, len(yv) - 1
        # célula (i, j) -> índice i + j*nx
        ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="xy")
        self.cells = np.column_stack([ii.ravel(), jj.ravel()])
        self.cell_origins = np.column_stack([xv[self.cells[:, 0]], yv[self.cells[:, 1]]])
        self.cell_sizes = np.column_stack([np.diff(xv)[self.cells[:, 0]], np.diff(yv)[self.cells[:, 1]]])
        self.h = float(np.max(self.cell_sizes))
        self._build_facets(nx, ny)

    def _build_facets(self, nx: int, ny: int):
        xv, yv = self.x_vertices, self.y_vertices
        interior: List[Facet] = []
        boundary: List[Facet] = []
        counter = 0
        # arestas verticais (normal em x)
        for i in range(nx + 1):
            for j in range(ny):
                span = (float(yv[j]), float(yv[j + 1]))
                if 0 < i < nx:
                    cells = (i - 1 + j * nx, i + j * nx)
                    interior.append(Facet(counter, 0, float(xv[i]), span, cells))
                else:
                    cell = (0 if i == 0 else nx - 1) + j * nx
                    boundary.append(Facet(counter, 0, float(xv[i]), span, (cell,), side=0 if i == 0 else 1))
                counter += 1
        # arestas horizontais (normal em y)
        for j in range(ny + 1):
            for i in range(nx):
                span = (float(xv[i]), float(xv[i + 1]))
                if 0 < j < ny:
                    cells = (i + (j - 1) * nx, i + j * nx)
                    interior.append(Facet(counter, 1, float(yv[j]), span, cells))
                else:
                    cell = i + (0 if j == 0 else ny - 1) * nx
                    boundary.append(Facet(counter, 1, float(yv[j]), span, (cell,), side=0 if j == 0 else 1))
                counter += 1
        self.interior_facets = interior
        self.boundary_facets = boundary

    def has_gridline(self, axis: int, coord: float) -> bool:
        grid = self.x_vertices if axis == 0 else self.y_vertices
        return bool(np.any(np.abs(grid - coord) <= COORD_TOL))

    def facets_on_segment(self, axis: int, position: float, lo: float, hi: float) -> List[Facet]:
        """
        Retorna as facetas que compõem o segmento {x_axis = position} x [lo, hi]

        Raises:
            MeshError: se o segmento não for união de arestas da malha
        """
        found = [
            f
            for f in self.interior_facets + self.boundary_facets
            if f.axis == axis
            and abs(f.position - position) <= COORD_TOL
            and f.span[0] >= lo - COORD_TOL
            and f.span[1] <= hi + COORD_TOL
        ]
        covered = sum(f.measure for f in found)
        if not found or abs(covered - (hi - lo)) > 1e-12:
            raise MeshError(f"Segmento axis={axis}, pos={position}, [{lo},{hi}] não é união de arestas")
        return sorted(found, key=lambda f: f.span[0])

    def _grids(self) -> List[np.ndarray]:
        return [self.x_vertices, self.y_vertices]


Mesh = _CartesianMesh


@dataclass(frozen=True)
class TimePartition:
    """Partição uniforme de [0, T] em N intervalos (time slabs)"""

    t_nodes: np.ndarray
    dt: float

    @property
    def n_slabs(self) -> int:
        return len(self.t_nodes) - 1

    @property
    def final_time(self) -> float:
        return float(self.t_nodes[-1])

    def slab_interval(self, n: int) -> Tuple[float, float]:
        return float(self.t_nodes[n]), float(self.t_nodes[n + 1])

    def locate(self, t: float, side: str = "right") -> Tuple[int, float]:
        """
        Localiza um instante numa fatia temporal

        Args:
            t: instante em [0, T]
            side: traço usado quando t coincide com um nó ('left' ou 'right')

        Returns:
            Tupla (índice da fatia, coordenada de referência em [0,1])
        """
        if side not in ("left", "right"):
            raise SpaceError(f"Lado de traço inválido: {side}")
        T = self.final_time
        if t < -COORD_TOL or t > T + COORD_TOL:
            raise SpaceError(f"Instante {t} fora de [0, {T}]")
        pos = t / self.dt
        node = int(round(pos))
        if abs(pos - node) <= 1e-10:
            n = node if side == "right" else node - 1
            n = min(max(n, 0), self.n_slabs - 1)
        else:
            n = min(int(np.floor(pos)), self.n_slabs - 1)
        tau = (t - self.t_nodes[n]) / self.dt
        return n, float(np.clip(tau, 0.0, 1.0))


def build_mesh_1d(level: int, required_points: Optional[Sequence[float]] = None) -> Mesh1D:
    """
    Constrói a malha uniforme com 2^(L+1) células, inserindo os pontos exigidos

    Args:
        level: nível de refinamento L >= 0
        required_points: interfaces e extremos de omega que precisam ser vértices

    Returns:
        Malha 1D ajustada
    """
    if level < 0:
        raise MeshError(f"Nível de refinamento negativo: {level}")
    required = list(required_points or [])
    for p in required:
        if not 0.0 < p < 1.0:
            raise MeshError(f"Ponto exigido fora de (0,1): {p}")

    n = 2 ** (level + 1)
    vertices = np.linspace(0.0, 1.0, n + 1)
    extra = [p for p in required if np.min(np.abs(vertices - p)) > COORD_TOL]
    if extra:
        # inserção de vértices não diádicos (ex.: p2 = 2/3)
        vertices = np.unique(np.concatenate([vertices, np.asarray(extra, dtype=float)]))
        logger.debug(f"Malha 1D L={level}: inseridos {len(extra)} vértices")
    return Mesh1D(vertices=vertices)


def build_mesh_2d(level: int) -> Mesh2D:
    """Constrói a malha (2^(L+1))^2 de quadriláteros; exige L >= 1 para ajustar omega"""
    if level < 1:
        raise MeshError(f"L={level} não ajusta a fronteira de omega; use L >= 1")
    n = 2 ** (level + 1)
    grid = np.linspace(0.0, 1.0, n + 1)
    mesh = Mesh2D(x_vertices=grid, y_vertices=grid.copy())
    for coord in FITTED_LINES_2D:
        if not (mesh.has_gridline(0, coord) and mesh.has_gridline(1, coord)):
            raise MeshError(f"Linha {coord} ausente da malha 2D")
    return mesh


def build_time_partition(final_time: float, n_slabs: int) -> TimePartition:
    """Partição equiespaçada 0 = t_0 < ... < t_N = T"""
    if final_time <= 0:
        raise MeshError(f"Tempo final deve ser positivo: {final_time}")
    if n_slabs < 1:
        raise MeshError(f"Número de fatias deve ser >= 1: {n_slabs}")
    dt = final_time / n_slabs
    t_nodes = dt * np.arange(n_slabs + 1)
    t_nodes[-1] = final_time
    return TimePartition(t_nodes=t_nodes, dt=dt)
