"""
Montagem do sistema de ponto de sela [K A^T; A -S*]
Versão: 1.0
Data: 2026-10-14

Todos os termos de fatia são somas de produtos de Kronecker entre uma matriz
temporal (nos "níveis" nó_temporal x campo x fatia) e uma matriz espacial,
porque c^2 não depende do tempo e as fatias têm o mesmo comprimento.
"""

import logging
import time
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from domain.fe_space import DiscreteField, SpaceTimeSpace, SpatialSpace
from domain.mesh_geometry import Facet
from domain.quadrature import elevated_rule, gauss_rule, volume_rule
from infrastructure.errors import AssemblyError

logger = logging.getLogger(__name__)

FIELD_INDEX = {"u1": 0, "u2": 1, "z1": 0, "z2": 1}


@dataclass(frozen=True)
class StabilizationWeights:
    """
    Pesos multiplicativos dos grupos de estabilização

    boundary é o fator de Nitsche lambda que multiplica h^-1 nos termos de fronteira
    (a configuração usa lambda = 20 k^2).
    """

    data: float = 1e4
    primal: float = 1e-3
    dual: float = 1.0
    jump: float = 1.0
    boundary: float = 20.0


@dataclass(frozen=True)
class DofLayout:
    """
    Numeração global fatia a fatia: [U da fatia 0, Z da fatia 0, U da fatia 1, ...],
    com U = (u1, u2) e Z = (z1, z2), cada campo ordenado nó temporal x DOF espacial.

    Os blocos nomeados do sistema continuam na ordem "por blocos": vetor primal
    (todas as fatias) seguido do vetor dual. to_blocks/from_blocks convertem.
    """

    n_slabs: int
    primal_spatial: int
    dual_spatial: int
    primal_time: int  # q + 1
    dual_time: int  # q* + 1

    @property
    def primal_per_slab(self) -> int:
        return 2 * self.primal_time * self.primal_spatial

    @property
    def dual_per_slab(self) -> int:
        return 2 * self.dual_time * self.dual_spatial

    @property
    def slab_size(self) -> int:
        return self.primal_per_slab + self.dual_per_slab

    @property
    def n_primal(self) -> int:
        return self.n_slabs * self.primal_per_slab

    @property
    def n_dual(self) -> int:
        return self.n_slabs * self.dual_per_slab

    @property
    def size(self) -> int:
        return self.n_primal + self.n_dual

    def slab_range(self, n: int) -> slice:
        """Índices globais (primal e dual) da fatia n"""
        return slice(n * self.slab_size, (n + 1) * self.slab_size)

    @cached_property
    def permutation(self) -> np.ndarray:
        """global[i] = blocos[permutation[i]]"""
        slabs = np.arange(self.n_slabs)[:, None]
        primal = slabs * self.primal_per_slab + np.arange(self.primal_per_slab)[None, :]
        dual = self.n_primal + slabs * self.dual_per_slab + np.arange(self.dual_per_slab)[None, :]
        return np.concatenate([primal, dual], axis=1).ravel()

    def to_blocks(self, vector: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Vetor global -> (U, Z) na ordem por blocos"""
        if vector.shape != (self.size,):
            raise AssemblyError(f"Vetor com shape {vector.shape}, esperado ({self.size},)")
        blocks = np.empty_like(vector)
        blocks[self.permutation] = vector
        return blocks[: self.n_primal], blocks[self.n_primal :]

    def from_blocks(self, primal: np.ndarray, dual: np.ndarray) -> np.ndarray:
        return np.concatenate([primal, dual])[self.permutation]

    def permute_matrix(self, matrix: sp.spmatrix) -> sp.csc_matrix:
        """P M P^T: matriz na ordem por blocos -> numeração global"""
        p = self.permutation
        return sp.csr_matrix(matrix)[p][:, p].tocsc()

    def field_vector(self, vector: np.ndarray, label: str) -> np.ndarray:
        """Extrai os coeficientes de um campo (fatia a fatia) do vetor global"""
        primal, dual = self.to_blocks(vector)
        part = primal if label in ("u1", "u2") else dual
        return part.reshape(self.n_slabs, 2, -1)[:, FIELD_INDEX[label], :].ravel()

    def split(self, vector: np.ndarray, primal: SpaceTimeSpace, dual: SpaceTimeSpace) -> Dict[str, DiscreteField]:
        fields = {}
        for label in ("u1", "u2"):
            fields[label] = DiscreteField.from_vector(primal, self.field_vector(vector, label), label)
        for label in ("z1", "z2"):
            fields[label] = DiscreteField.from_vector(dual, self.field_vector(vector, label), label)
        return fields

    def join(self, fields: Dict[str, DiscreteField]) -> np.ndarray:
        """Inverso de split: monta o vetor global a partir dos quatro campos"""
        primal = np.stack([fields["u1"].to_vector(), fields["u2"].to_vector()])
        dual = np.stack([fields["z1"].to_vector(), fields["z2"].to_vector()])
        primal = primal.reshape(2, self.n_slabs, -1).transpose(1, 0, 2).ravel()
        dual = dual.reshape(2, self.n_slabs, -1).transpose(1, 0, 2).ravel()
        return self.from_blocks(primal, dual)


@dataclass
class SaddleSystem:
    """Matriz simétrica indefinida, lado direito e blocos nomeados para diagnósticos"""

    matrix: sp.csc_matrix
    rhs: np.ndarray
    layout: DofLayout
    blocks: Dict[str, sp.spmatrix] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.layout.size


# ---------------------------------------------------------------------------
# Formas temporais no intervalo de referência
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TimeForms:
    """Matrizes temporais [teste, tentativa] de uma fatia de comprimento dt"""

    mass: np.ndarray  # dt * int theta_j psi_i
    deriv: np.ndarray  # int theta_j' psi_i
    deriv_deriv: np.ndarray  # (1/dt) int theta_j' psi_i'
    start_test: np.ndarray
    end_test: np.ndarray
    start_trial: np.ndarray
    end_trial: np.ndarray


def time_forms(test: SpaceTimeSpace, trial: SpaceTimeSpace) -> TimeForms:
    dt = trial.partition.dt
    rule = gauss_rule(max(test.time_degree, trial.time_degree) + 2)
    tau = rule.points[:, 0]
    w = rule.weights
    psi, dpsi = test.time_basis.evaluate(tau), test.time_basis.evaluate(tau, 1)
    theta, dtheta = trial.time_basis.evaluate(tau), trial.time_basis.evaluate(tau, 1)
    ends = np.array([0.0, 1.0])
    te_ends, tr_ends = test.time_basis.evaluate(ends), trial.time_basis.evaluate(ends)
    return TimeForms(
        mass=dt * (psi.T * w) @ theta,
        deriv=(psi.T * w) @ dtheta,
        deriv_deriv=(dpsi.T * w) @ dtheta / dt,
        start_test=te_ends[0],
        end_test=te_ends[1],
        start_trial=tr_ends[0],
        end_trial=tr_ends[1],
    )


def slab_term(n_slabs: int, field_test: int, field_trial: int, time_matrix: np.ndarray) -> sp.csr_matrix:
    """Matriz de níveis temporais bloco-diagonal por fatia, no bloco (campo teste, campo tentativa)"""
    select = sp.coo_matrix(([1.0], ([field_test], [field_trial])), shape=(2, 2))
    return sp.kron(sp.identity(n_slabs, format="csr"), sp.kron(select, sp.csr_matrix(time_matrix)), format="csr")


def jump_levels(n_slabs: int, field_index: int, start: np.ndarray, end: np.ndarray) -> sp.csr_matrix:
    """
    Operador de salto nos níveis temporais: linha n-1 = traço(t_n^+) - traço(t_n^-)

    Returns:
        Matriz (N-1) x (2 N (q+1))
    """
    nt = len(start)
    per_slab = 2 * nt
    rows, cols, vals = [], [], []
    for n in range(1, n_slabs):
        for j in range(nt):
            rows += [n - 1, n - 1]
            cols += [n * per_slab + field_index * nt + j, (n - 1) * per_slab + field_index * nt + j]
            vals += [start[j], -end[j]]
    return sp.csr_matrix((vals, (rows, cols)), shape=(max(n_slabs - 1, 0), n_slabs * per_slab))


# ---------------------------------------------------------------------------
# Formas espaciais
# ---------------------------------------------------------------------------


def _scatter(local: np.ndarray, test_dofs: np.ndarray, trial_dofs: np.ndarray, shape: Tuple[int, int]) -> sp.csr_matrix:
    """Soma matrizes locais (n, nte, ntr) na matriz global"""
    rows = np.broadcast_to(test_dofs[:, :, None], local.shape).ravel()
    cols = np.broadcast_to(trial_dofs[:, None, :], local.shape).ravel()
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=shape).tocsr()


def _symmetrize(mat: sp.spmatrix) -> sp.csr_matrix:
    return (0.5 * (mat + mat.T)).tocsr()


def _facet_reference(dim: int, axis: int, side: float, degree: int) -> Tuple[np.ndarray, np.ndarray]:
    """Pontos de referência (nq, dim) numa face da célula e pesos tangenciais (somam 1)"""
    if dim == 1:
        return np.array([[side]]), np.array([1.0])
    rule = gauss_rule(degree + 2)
    pts = np.zeros((rule.n_points, 2))
    pts[:, axis] = side
    pts[:, 1 - axis] = rule.points[:, 0]
    return pts, rule.weights


class SpatialForms:
    """Matrizes espaciais [teste, tentativa] entre dois espaços na mesma malha"""

    def __init__(self, test: SpatialSpace, trial: SpatialSpace, csq: np.ndarray):
        if test.mesh is not trial.mesh:
            raise AssemblyError("Espaços de teste e tentativa em malhas diferentes")
        self.test = test
        self.trial = trial
        self.mesh = test.mesh
        self.csq = csq
        self.shape = (test.n_dofs, trial.n_dofs)
        rule = volume_rule(self.mesh.dim, max(test.degree, trial.degree))
        self._w = rule.weights
        self._te = test.tabulate(rule.points)
        self._tr = trial.tabulate(rule.points)

    def _ref(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a.T * self._w) @ b

    def _assemble(self, scale: np.ndarray, ref: np.ndarray, cells: Optional[np.ndarray] = None) -> sp.csr_matrix:
        local = scale[:, None, None] * ref[None, :, :]
        if cells is not None:
            local = local * cells[:, None, None]
        return _scatter(local, self.test.cell_dofs, self.trial.cell_dofs, self.shape)

    def mass(self, cell_weight: Optional[np.ndarray] = None, cells: Optional[np.ndarray] = None) -> sp.csr_matrix:
        scale = self.mesh.cell_measures * (1.0 if cell_weight is None else cell_weight)
        return self._assemble(scale, self._ref(self._te.values, self._tr.values), cells)

    def stiffness(self, cell_weight: Optional[np.ndarray] = None) -> sp.csr_matrix:
        """int w grad(phi_j) . grad(psi_i) com peso por célula"""
        weight = self.mesh.cell_measures * (1.0 if cell_weight is None else cell_weight)
        total = None
        for d in range(self.mesh.dim):
            scale = weight / self.mesh.cell_sizes[:, d] ** 2
            term = self._assemble(scale, self._ref(self._te.grads[d], self._tr.grads[d]))
            total = term if total is None else total + term
        return total

    def value_laplacian(self, cell_weight: np.ndarray) -> sp.csr_matrix:
        """int w lap(phi_j) psi_i (teste em valor, tentativa em laplaciano)"""
        weight = self.mesh.cell_measures * cell_weight
        total = None
        for d in range(self.mesh.dim):
            scale = weight / self.mesh.cell_sizes[:, d] ** 2
            term = self._assemble(scale, self._ref(self._te.values, self._tr.second[d]))
            total = term if total is None else total + term
        return total

    def laplacian_laplacian(self, cell_weight: np.ndarray) -> sp.csr_matrix:
        weight = self.mesh.cell_measures * cell_weight
        total = None
        for d in range(self.mesh.dim):
            for e in range(self.mesh.dim):
                scale = weight / (self.mesh.cell_sizes[:, d] ** 2 * self.mesh.cell_sizes[:, e] ** 2)
                term = self._assemble(scale, self._ref(self._te.second[d], self._tr.second[e]))
                total = term if total is None else total + term
        return total

    def pure_second(self, cell_weight: np.ndarray) -> sp.csr_matrix:
        """Soma das derivadas segundas puras: sum_d int w d_dd(phi_j) d_dd(psi_i)"""
        weight = self.mesh.cell_measures * cell_weight
        total = None
        for d in range(self.mesh.dim):
            scale = weight / self.mesh.cell_sizes[:, d] ** 4
            term = self._assemble(scale, self._ref(self._te.second[d], self._tr.second[d]))
            total = term if total is None else total + term
        return total

    def _boundary_groups(self) -> Dict[Tuple[int, int], List[Facet]]:
        groups: Dict[Tuple[int, int], List[Facet]] = {}
        for facet in self.mesh.boundary_facets:
            groups.setdefault((facet.axis, facet.side), []).append(facet)
        return groups

    def boundary_flux(self) -> sp.csr_matrix:
        """int_{dOmega} c^2 grad(phi_j).n psi_i"""
        total = sp.csr_matrix(self.shape)
        for (axis, side), facets in self._boundary_groups().items():
            pts, w = _facet_reference(self.mesh.dim, axis, float(side), max(self.test.degree, self.trial.degree))
            te, tr = self.test.tabulate(pts), self.trial.tabulate(pts)
            cells = np.array([f.cells[0] for f in facets])
            measure = np.array([f.measure for f in facets])
            sign = 1.0 if side == 1 else -1.0
            scale = measure * self.csq[cells] * sign / self.mesh.cell_sizes[cells, axis]
            ref = (te.values.T * w) @ tr.grads[axis]
            local = scale[:, None, None] * ref[None]
            total = total + _scatter(local, self.test.cell_dofs[cells], self.trial.cell_dofs[cells], self.shape)
        return total

    def boundary_mass(self, inverse_h: bool = True) -> sp.csr_matrix:
        """int_{dOmega} h^-1 phi_j psi_i, com h o diâmetro da célula vizinha"""
        total = sp.csr_matrix(self.shape)
        for (axis, side), facets in self._boundary_groups().items():
            pts, w = _facet_reference(self.mesh.dim, axis, float(side), max(self.test.degree, self.trial.degree))
            te, tr = self.test.tabulate(pts), self.trial.tabulate(pts)
            cells = np.array([f.cells[0] for f in facets])
            measure = np.array([f.measure for f in facets])
            scale = measure / self.mesh.cell_diameters[cells] if inverse_h else measure
            ref = (te.values.T * w) @ tr.values
            local = scale[:, None, None] * ref[None]
            total = total + _scatter(local, self.test.cell_dofs[cells], self.trial.cell_dofs[cells], self.shape)
        return total

    def interior_penalty(self) -> sp.csr_matrix:
        """sum_F h_F int_F [[c^2 grad u . n]] [[c^2 grad w . n]] (facetas internas, inclusive interface)"""
        if self.test is not self.trial:
            raise AssemblyError("Penalidade interior exige o mesmo espaço de teste e tentativa")
        space = self.trial
        total = sp.csr_matrix(self.shape)
        for axis in range(self.mesh.dim):
            facets = [f for f in self.mesh.interior_facets if f.axis == axis]
            if not facets:
                continue
            minus = np.array([f.cells[0] for f in facets])
            plus = np.array([f.cells[1] for f in facets])
            pts_m, w = _facet_reference(self.mesh.dim, axis, 1.0, space.degree)
            pts_p, _ = _facet_reference(self.mesh.dim, axis, 0.0, space.degree)
            g_m = space.tabulate(pts_m).grads[axis]
            g_p = space.tabulate(pts_p).grads[axis]
            alpha = self.csq[minus] / self.mesh.cell_sizes[minus, axis]
            beta = self.csq[plus] / self.mesh.cell_sizes[plus, axis]
            h_f = 0.5 * (self.mesh.cell_diameters[minus] + self.mesh.cell_diameters[plus])
            scale = h_f * np.array([f.measure for f in facets])
            mm, mp = (g_m.T * w) @ g_m, (g_m.T * w) @ g_p
            pm, pp = (g_p.T * w) @ g_m, (g_p.T * w) @ g_p
            top = np.concatenate([alpha[:, None, None] ** 2 * mm, -(alpha * beta)[:, None, None] * mp], axis=2)
            bottom = np.concatenate([-(alpha * beta)[:, None, None] * pm, beta[:, None, None] ** 2 * pp], axis=2)
            local = scale[:, None, None] * np.concatenate([top, bottom], axis=1)
            dofs = np.concatenate([space.cell_dofs[minus], space.cell_dofs[plus]], axis=1)
            total = total + _scatter(local, dofs, dofs, self.shape)
        return total


def space_time_load(space: SpaceTimeSpace, f: Callable, cells: np.ndarray) -> np.ndarray:
    """
    Carga int_{I_n} (f, theta_j phi_i)_K somada sobre as células dadas

    Args:
        space: espaço espaço-tempo de teste
        f: função f(t, x) com x de shape (m, dim)
        cells: índices das células de integração

    Returns:
        Array (N, q+1, n_espacial)
    """
    spatial = space.spatial
    mesh = spatial.mesh
    dt = space.partition.dt
    out = np.zeros((space.n_slabs, space.time_degree + 1, spatial.n_dofs))
    if cells.size == 0:
        return out
    rule = elevated_rule(mesh.dim, spatial.degree)
    tab = spatial.tabulate(rule.points)
    phys = mesh.cell_origins[cells, None, :] + rule.points[None] * mesh.cell_sizes[cells, None, :]
    flat = phys.reshape(-1, mesh.dim)
    weights = mesh.cell_measures[cells][:, None] * rule.weights[None, :]
    t_rule = gauss_rule(min(space.time_degree + 6, 20))
    theta = space.time_basis.evaluate(t_rule.points[:, 0])
    for n in range(space.n_slabs):
        t0, _ = space.partition.slab_interval(n)
        for m, tau in enumerate(t_rule.points[:, 0]):
            values = np.asarray(f(t0 + tau * dt, flat), dtype=float).reshape(cells.size, -1)
            local = (values * weights) @ tab.values  # (nc, nloc)
            load = np.zeros(spatial.n_dofs)
            np.add.at(load, spatial.cell_dofs[cells], local)
            out[n] += dt * t_rule.weights[m] * np.outer(theta[m], load)
    return out


# ---------------------------------------------------------------------------
# Montador
# ---------------------------------------------------------------------------


class SaddlePointAssembler:
    """Monta os blocos A, S_h, S*, S^{updown}, massa de dados e o lado direito"""

    def __init__(
        self,
        primal: SpaceTimeSpace,
        dual: SpaceTimeSpace,
        csq: np.ndarray,
        omega_cells: np.ndarray,
        weights: StabilizationWeights = StabilizationWeights(),
    ):
        if primal.partition is not dual.partition and (
            primal.n_slabs != dual.n_slabs or abs(primal.partition.dt - dual.partition.dt) > 1e-15
        ):
            raise AssemblyError("Partições temporais primal e dual incompatíveis")
        mesh = primal.spatial.mesh
        if csq.shape != (mesh.n_cells,) or omega_cells.shape != (mesh.n_cells,):
            raise AssemblyError("c^2 e indicador de omega devem ter um valor por célula")
        self.primal = primal
        self.dual = dual
        self.csq = np.asarray(csq, dtype=float)
        self.omega_cells = omega_cells.astype(float)
        self.weights = weights
        self.mesh = mesh
        self.n_slabs = primal.n_slabs
        self.dt = primal.partition.dt
        self.logger = logging.getLogger(__name__)
        self.layout = DofLayout(
            n_slabs=self.n_slabs,
            primal_spatial=primal.spatial.n_dofs,
            dual_spatial=dual.spatial.n_dofs,
            primal_time=primal.time_degree + 1,
            dual_time=dual.time_degree + 1,
        )
        self._pp = SpatialForms(primal.spatial, primal.spatial, self.csq)
        self._dp = SpatialForms(dual.spatial, primal.spatial, self.csq)
        self._dd = SpatialForms(dual.spatial, dual.spatial, self.csq)
        self._t_pp = time_forms(primal, primal)
        self._t_dp = time_forms(dual, primal)
        self._t_dd = time_forms(dual, dual)

    def _kron(self, field_test: int, field_trial: int, time_matrix: np.ndarray, space_matrix) -> sp.csr_matrix:
        levels = slab_term(self.n_slabs, field_test, field_trial, time_matrix)
        return sp.kron(levels, space_matrix, format="csr")

    # -- A ------------------------------------------------------------------

    def assemble_A(self) -> sp.csr_matrix:
        """
        A[U, Y] = sum_n (d_t u2, y1) + a(u1, y1) + (d_t u1 - u2, y2) - (c^2 grad u1 . n, y1)_Sigma

        Returns:
            Bloco (n_dual x n_primal), linhas = teste dual, colunas = tentativa primal
        """
        f = self._dp
        t = self._t_dp
        mass = f.mass()
        a_11 = f.stiffness(self.csq) - f.boundary_flux()
        blocks = (
            self._kron(0, 0, t.mass, a_11)
            + self._kron(0, 1, t.deriv, mass)
            + self._kron(1, 0, t.deriv, mass)
            - self._kron(1, 1, t.mass, mass)
        )
        return blocks.tocsr()

    # -- S_h ----------------------------------------------------------------

    def primal_stabilizer_parts(self) -> Dict[str, sp.csr_matrix]:
        """Componentes J, G, I0 e R de S_h (sem o peso primal)"""
        f = self._pp
        t = self._t_pp
        h2 = self.mesh.cell_diameters**2
        mass = _symmetrize(f.mass())
        mass_h2 = _symmetrize(f.mass(h2))
        lap_mix = f.value_laplacian(h2 * self.csq)  # h^2 (c^2 lap u1, w2)
        lap_lap = _symmetrize(f.laplacian_laplacian(h2 * self.csq**2))
        penalty = _symmetrize(f.interior_penalty())
        boundary = _symmetrize(f.boundary_mass()) * self.weights.boundary
        parts = {
            "J": self._kron(0, 0, t.mass, penalty),
            "G": (
                self._kron(0, 0, t.mass, lap_lap)
                - self._kron(0, 1, t.deriv, lap_mix.T.tocsr())
                - self._kron(1, 0, t.deriv.T, lap_mix)
                + self._kron(1, 1, t.deriv_deriv, mass_h2)
            ),
            "I0": (
                self._kron(0, 0, t.deriv_deriv, mass)
                - self._kron(0, 1, t.deriv.T, mass)
                - self._kron(1, 0, t.deriv, mass)
                + self._kron(1, 1, t.mass, mass)
            ),
            "R": self._kron(0, 0, t.mass, boundary),
        }
        return {name: mat.tocsr() for name, mat in parts.items()}

    def assemble_primal_stabilizer(self) -> sp.csr_matrix:
        """S_h = J + G + I0 + R"""
        parts = list(self.primal_stabilizer_parts().values())
        total = parts[0]
        for part in parts[1:]:
            total = total + part
        return (self.weights.primal * total).tocsr()

    # -- S* -----------------------------------------------------------------

    def assemble_dual_stabilizer(self) -> sp.csr_matrix:
        """S*(Y, Z) = sum_n (y1,z1) + a(y1,z1) + (y2,z2) + lambda h^-1 (y1,z1)_Sigma"""
        f = self._dd
        t = self._t_dd
        mass = _symmetrize(f.mass())
        z1 = mass + _symmetrize(f.stiffness(self.csq)) + self.weights.boundary * _symmetrize(f.boundary_mass())
        total = self._kron(0, 0, t.mass, z1) + self._kron(1, 1, t.mass, mass)
        return (self.weights.dual * total).tocsr()

    # -- S^{updown} ---------------------------------------------------------

    def assemble_time_jump_stabilizer(self) -> sp.csr_matrix:
        """
        Saltos temporais nos nós internos t_1..t_{N-1}:
        (1/dt)([[u1]], [[w1]]) + dt (c^2 [[grad u1]], c^2 [[grad w1]]) + (1/dt)([[u2]], [[w2]])

        O peso c^2 aparece nos dois argumentos (peso efetivo c^4).
        """
        size = self.layout.n_primal
        if self.n_slabs < 2:
            return sp.csr_matrix((size, size))
        f = self._pp
        t = self._t_pp
        mass = _symmetrize(f.mass())
        space_u1 = mass / self.dt + self.dt * _symmetrize(f.stiffness(self.csq**2))
        space_u2 = mass / self.dt
        total = None
        for index, space_matrix in ((0, space_u1), (1, space_u2)):
            jumps = jump_levels(self.n_slabs, index, t.start_trial, t.end_trial)
            term = sp.kron((jumps.T @ jumps).tocsr(), space_matrix, format="csr")
            total = term if total is None else total + term
        return (self.weights.jump * total).tocsr()

    # -- dados --------------------------------------------------------------

    def data_mass(self) -> sp.csr_matrix:
        """(u1, w1)_{omega_T}"""
        mass = _symmetrize(self._pp.mass(cells=self.omega_cells))
        return (self.weights.data * self._kron(0, 0, self._t_pp.mass, mass)).tocsr()

    def _levels_to_primal(self, level_values: np.ndarray) -> np.ndarray:
        """(N, q+1, n_espacial) de u1 -> vetor primal global"""
        out = np.zeros((self.n_slabs, 2, level_values.shape[1], level_values.shape[2]))
        out[:, 0] = level_values
        return out.ravel()

    def data_rhs(self, data: Callable) -> np.ndarray:
        """(u_omega, w1)_{omega_T} com quadratura elevada em espaço e tempo"""
        cells = np.flatnonzero(self.omega_cells > 0)
        return self.weights.data * self._levels_to_primal(space_time_load(self.primal, data, cells))

    def boundary_rhs(self, boundary_data: Callable) -> np.ndarray:
        """lambda h^-1 (g, w1)_Sigma: termo consistente de R quando u não se anula em Sigma"""
        space = self.primal.spatial
        nt = self.primal.time_degree + 1
        out = np.zeros((self.n_slabs, nt, space.n_dofs))
        t_rule = gauss_rule(min(self.primal.time_degree + 6, 20))
        theta = self.primal.time_basis.evaluate(t_rule.points[:, 0])
        for facet in self.mesh.boundary_facets:
            cell = facet.cells[0]
            pts, w = _facet_reference(self.mesh.dim, facet.axis, float(facet.side), space.degree + 4)
            tab = space.tabulate(pts)
            phys = self.mesh.cell_origins[cell] + pts * self.mesh.cell_sizes[cell]
            scale = facet.measure / self.mesh.cell_diameters[cell]
            dofs = space.cell_dofs[cell]
            for n in range(self.n_slabs):
                t0, _ = self.primal.partition.slab_interval(n)
                for m, tau in enumerate(t_rule.points[:, 0]):
                    g = np.asarray(boundary_data(t0 + tau * self.dt, phys), dtype=float)
                    local = scale * ((g * w) @ tab.values)
                    out[n][:, dofs] += self.dt * t_rule.weights[m] * np.outer(theta[m], local)
        return self.weights.primal * self.weights.boundary * self._levels_to_primal(out)

    def assemble_data_terms(
        self, data: Callable, boundary_data: Optional[Callable] = None
    ) -> Tuple[sp.csr_matrix, np.ndarray]:
        """
        Bloco de massa em omega_T e lado direito primal

        Args:
            data: u_omega(t, x)
            boundary_data: g(t, x) em Sigma; None equivale a g = 0

        Returns:
            Tupla (massa de dados n_primal x n_primal, lado direito primal)
        """
        rhs = self.data_rhs(data)
        if boundary_data is not None:
            rhs = rhs + self.boundary_rhs(boundary_data)
        return self.data_mass(), rhs

    # -- normas fortalecidas -----------------------------------------------

    def strong_norm_matrices(self) -> Dict[str, sp.csr_matrix]:
        """Matrizes (primais) dos termos extras da norma fortalecida"""
        f = self._pp
        t = self._t_pp
        h2 = self.mesh.cell_diameters**2
        mass = _symmetrize(f.mass())
        c4 = self.csq**2
        h2_block = (
            _symmetrize(f.mass(h2 * c4)) + _symmetrize(f.stiffness(h2 * c4)) + _symmetrize(f.pure_second(h2 * c4))
        )
        return {
            "dt_u2": self._kron(1, 1, t.deriv_deriv, mass),
            "c2_grad_u1": self._kron(0, 0, t.mass, _symmetrize(f.stiffness(c4))),
            "dt_u1": self._kron(0, 0, t.deriv_deriv, mass),
            "u2": self._kron(1, 1, t.mass, mass),
            "h2_c2_u1_H2": self._kron(0, 0, t.mass, h2_block),
        }

    # -- sistema completo ---------------------------------------------------

    def assemble_system(self, data: Callable, boundary_data: Optional[Callable] = None) -> SaddleSystem:
        """
        M = [K A^T; A -S*], b = [dados; 0] com K = massa_omega + S_h + S^{updown}

        A matriz final segue a numeração fatia a fatia do DofLayout: bloco tridiagonal,
        pois só S^{updown} acopla fatias vizinhas.
        """
        start = time.perf_counter()
        data_block, rhs_primal = self.assemble_data_terms(data, boundary_data)
        s_h = self.assemble_primal_stabilizer()
        s_jump = self.assemble_time_jump_stabilizer()
        s_dual = self.assemble_dual_stabilizer()
        a = self.assemble_A()
        k = (data_block + s_h + s_jump).tocsr()
        expected = (self.layout.n_dual, self.layout.n_primal)
        if a.shape != expected:
            raise AssemblyError(f"Bloco A com shape {a.shape}, esperado {expected}")
        by_blocks = sp.bmat([[k, a.T], [a, -s_dual]], format="csr")
        matrix = self.layout.permute_matrix(by_blocks)
        rhs = self.layout.from_blocks(rhs_primal, np.zeros(self.layout.n_dual))
        self.logger.info(
            f"Sistema montado: {matrix.shape[0]} incógnitas, {matrix.nnz} não nulos "
            f"({time.perf_counter() - start:.2f}s)"
        )
        return SaddleSystem(
            matrix=matrix,
            rhs=rhs,
            layout=self.layout,
            blocks={"data": data_block, "S_h": s_h, "S_jump": s_jump, "S_dual": s_dual, "A": a},
        )


def dump_matrix(matrix: sp.spmatrix, path: Path) -> Path:
    """Grava a matriz em formato texto de coordenadas: linha coluna valor"""
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"% {coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
        for i in order:
            f.write(f"{coo.row[i]} {coo.col[i]} {coo.data[i]:.17e}\n")
    return path
