from dataclasses import replace

import numpy as np
import pytest
import scipy.sparse.linalg as spla

from application.assembly import SaddlePointAssembler, StabilizationWeights, dump_matrix, time_forms
from application.postproc import split_solution, tnorm_components
from application.solver import factor, solve_with_residual
from domain.fe_space import SpaceTimeSpace, SpatialSpace, interpolate
from domain.mesh_geometry import build_mesh_1d, build_time_partition
from dto.run_config import RunConfig
from experiment_factory import ExperimentFactory
from infrastructure.errors import AssemblyError


def _polynomial_setup(tiny_config):
    return ExperimentFactory().build_problem(tiny_config.with_overrides(solution="polynomial"))


def _interpolated_state(setup):
    """Vetor global com (u1, u2) interpolados da solução exata e Z = 0"""
    exact = setup.exact
    fields = {
        "u1": interpolate(exact.value, setup.primal, "u1"),
        "u2": interpolate(exact.dt, setup.primal, "u2"),
        "z1": interpolate(lambda t, x: 0.0 * x[:, 0], setup.dual, "z1"),
        "z2": interpolate(lambda t, x: 0.0 * x[:, 0], setup.dual, "z2"),
    }
    return setup.assembler.layout.join(fields), fields


def test_system_dimensions(tiny_setup):
    system = tiny_setup.assembler.assemble_system(tiny_setup.data, tiny_setup.exact.value)
    layout = system.layout
    # N = 2 fatias, q + 1 = 2 nós temporais, 5 DOFs espaciais
    assert layout.n_primal == 2 * 2 * 2 * 5
    assert layout.n_dual == layout.n_primal
    assert system.matrix.shape == (80, 80)
    assert system.rhs.shape == (80,)
    assert system.blocks["A"].shape == (layout.n_dual, layout.n_primal)
    _, dual_rhs = layout.to_blocks(system.rhs)
    assert not np.any(dual_rhs)


def test_matrix_is_symmetric(tiny_setup):
    matrix = tiny_setup.assembler.assemble_system(tiny_setup.data).matrix
    assert spla.norm(matrix - matrix.T) / spla.norm(matrix) < 1e-12


def test_quadratic_form_identity(tiny_setup, rng):
    system = tiny_setup.assembler.assemble_system(tiny_setup.data, tiny_setup.exact.value)
    n_primal = system.layout.n_primal
    for _ in range(20):
        x = rng.standard_normal(system.size)
        primal, dual = split_solution(system, x)
        mirrored = system.layout.from_blocks(primal, -dual)
        lhs = mirrored @ (system.matrix @ x)
        total = tnorm_components(system, primal, dual).total
        assert lhs == pytest.approx(total, rel=1e-10)
        assert primal.size == n_primal


def test_stabilizers_are_semidefinite(tiny_setup):
    assembler = tiny_setup.assembler
    for matrix in (assembler.assemble_primal_stabilizer(), assembler.assemble_time_jump_stabilizer()):
        eig = np.linalg.eigvalsh(matrix.toarray())
        assert eig.min() >= -1e-10 * eig.max()
    dual_eig = np.linalg.eigvalsh(assembler.assemble_dual_stabilizer().toarray())
    assert dual_eig.min() > 0.0


def test_A_matches_dense_oracle():
    c1, c2, h, dt = 2.0, 1.0, 0.5, 0.2
    space = SpaceTimeSpace(SpatialSpace(build_mesh_1d(0), 1), build_time_partition(dt, 1), 1)
    assembler = SaddlePointAssembler(space, space, np.array([c1**2, c2**2]), np.array([True, False]))

    mass = h / 6.0 * np.array([[2.0, 1.0, 0.0], [1.0, 4.0, 1.0], [0.0, 1.0, 2.0]])
    a, b = c1**2 / h, c2**2 / h
    stiffness = np.array([[a, -a, 0.0], [-a, a + b, -b], [0.0, -b, b]])
    flux = np.zeros((3, 3))
    flux[0, :2] = [a, -a]
    flux[2, 1:] = [-b, b]
    time_mass = dt / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]])
    time_deriv = np.array([[-0.5, 0.5], [-0.5, 0.5]])

    def block(test, trial, time_matrix, space_matrix):
        select = np.zeros((2, 2))
        select[test, trial] = 1.0
        return np.kron(np.kron(select, time_matrix), space_matrix)

    expected = (
        block(0, 0, time_mass, stiffness - flux)
        + block(0, 1, time_deriv, mass)
        + block(1, 0, time_deriv, mass)
        - block(1, 1, time_mass, mass)
    )
    assert np.allclose(assembler.assemble_A().toarray(), expected, rtol=0.0, atol=1e-13)


def test_time_forms_partition_of_unity(space_1d):
    forms = time_forms(space_1d, space_1d)
    dt = space_1d.partition.dt
    assert forms.mass.sum() == pytest.approx(dt)
    assert np.allclose(forms.deriv.sum(axis=1), 0.0, atol=1e-14)
    assert forms.start_trial == pytest.approx([1.0, 0.0])
    assert forms.end_trial == pytest.approx([0.0, 1.0])


def test_data_terms_against_measure_of_omega(tiny_setup):
    assembler = tiny_setup.assembler
    block, rhs = assembler.assemble_data_terms(lambda t, x: np.ones(len(x)))
    # |omega| = 0.5 e T = 0.5
    assert rhs.sum() == pytest.approx(0.25, rel=1e-12)

    ones_u1 = np.zeros(assembler.layout.n_primal)
    ones_u1.reshape(assembler.n_slabs, 2, -1)[:, 0, :] = 1.0
    assert ones_u1 @ (block @ ones_u1) == pytest.approx(0.25, rel=1e-12)


def test_boundary_rhs_with_unit_data(tiny_setup):
    assembler = tiny_setup.assembler
    rhs = assembler.boundary_rhs(lambda t, x: np.ones(len(x)))
    # sum_n dt (1/h_0 + 1/h_last) = 0.5 * (4 + 4)
    assert rhs.sum() == pytest.approx(4.0, rel=1e-12)


def test_stabilization_weights_scale_blocks(tiny_setup):
    base = tiny_setup.assembler
    weights = replace(base.weights, dual=2.0, jump=3.0)
    weighted = SaddlePointAssembler(base.primal, base.dual, base.csq, base.omega_cells > 0, weights)
    assert spla.norm(weighted.assemble_dual_stabilizer() - 2.0 * base.assemble_dual_stabilizer()) < 1e-12
    assert spla.norm(weighted.assemble_time_jump_stabilizer() - 3.0 * base.assemble_time_jump_stabilizer()) < 1e-9


def test_discrete_solution_annihilates_consistent_terms(tiny_config):
    setup = _polynomial_setup(tiny_config)
    assembler = setup.assembler
    x, _ = _interpolated_state(setup)
    primal, _ = assembler.layout.to_blocks(x)
    assert np.abs(assembler.assemble_A() @ primal).max() < 1e-12
    # arredondamento relativo à escala do vetor
    tol = 1e-12 * max(1.0, primal @ primal)
    parts = assembler.primal_stabilizer_parts()
    for name in ("J", "G", "I0"):
        assert abs(primal @ (parts[name] @ primal)) < tol
    assert abs(primal @ (assembler.assemble_time_jump_stabilizer() @ primal)) < tol
    assert primal @ (parts["R"] @ primal) > 0.0


def test_solution_in_discrete_space_is_reproduced(tiny_config):
    setup = _polynomial_setup(tiny_config)
    system = setup.assembler.assemble_system(setup.data, setup.exact.value)
    solution, residual = solve_with_residual(factor(system.matrix), system.rhs)
    expected, _ = _interpolated_state(setup)
    assert residual < 1e-9
    assert np.abs(solution - expected).max() < 1e-8


def test_zero_data_gives_zero_solution(tiny_config):
    setup = ExperimentFactory().build_problem(tiny_config.with_overrides(solution="zero"))
    system = setup.assembler.assemble_system(setup.data, setup.exact.value)
    assert not np.any(system.rhs)
    solution, residual = solve_with_residual(factor(system.matrix), system.rhs)
    assert np.abs(solution).max() < 1e-10
    assert residual == 0.0


def test_single_slab_has_no_time_jumps(tiny_config):
    setup = ExperimentFactory().build_problem(tiny_config.with_overrides(final_time=0.25))
    assert setup.partition.n_slabs == 1
    assert setup.assembler.assemble_time_jump_stabilizer().nnz == 0


def test_assembler_rejects_inconsistent_inputs(space_1d):
    with pytest.raises(AssemblyError):
        SaddlePointAssembler(space_1d, space_1d, np.ones(3), np.ones(4, dtype=bool))


def test_dump_matrix(tiny_setup, tmp_path):
    matrix = tiny_setup.assembler.assemble_A()
    path = dump_matrix(matrix, tmp_path / "dump" / "A.txt")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == f"% {matrix.shape[0]} {matrix.shape[1]} {matrix.nnz}"
    assert len(lines) == matrix.nnz + 1
    row, col, value = lines[1].split()
    assert float(value) == pytest.approx(matrix[int(row), int(col)], rel=1e-15)


def test_layout_interleaves_primal_and_dual_per_slab(tiny_setup, rng):
    layout = tiny_setup.assembler.layout
    perm = layout.permutation
    assert sorted(perm.tolist()) == list(range(layout.size))
    # fatia 0: primeiro U da fatia 0, depois Z da fatia 0
    assert perm[: layout.primal_per_slab].tolist() == list(range(layout.primal_per_slab))
    assert perm[layout.primal_per_slab] == layout.n_primal
    assert layout.slab_range(1).start == layout.slab_size

    primal, dual = rng.standard_normal(layout.n_primal), rng.standard_normal(layout.n_dual)
    back_primal, back_dual = layout.to_blocks(layout.from_blocks(primal, dual))
    assert np.array_equal(back_primal, primal) and np.array_equal(back_dual, dual)


def test_global_matrix_is_block_tridiagonal_in_slabs(tiny_config):
    setup = ExperimentFactory().build_problem(tiny_config.with_overrides(final_time=1.0))
    system = setup.assembler.assemble_system(setup.data, setup.exact.value)
    slab = system.layout.slab_size
    coo = system.matrix.tocoo()
    distance = np.abs(coo.row // slab - coo.col // slab)
    assert setup.partition.n_slabs == 4
    assert distance.max() == 1
    # acoplamento entre fatias apenas por S^{updown} (bloco primal)
    coupled = distance == 1
    assert np.all(coo.row[coupled] % slab < system.layout.primal_per_slab)
    assert np.all(coo.col[coupled] % slab < system.layout.primal_per_slab)


def test_boundary_terms_scale_with_nitsche_factor(tiny_setup):
    base = tiny_setup.assembler
    assert base.weights.boundary == pytest.approx(1.0)
    scaled = SaddlePointAssembler(
        base.primal, base.dual, base.csq, base.omega_cells > 0, replace(base.weights, boundary=20.0)
    )
    r_base = base.primal_stabilizer_parts()["R"]
    r_scaled = scaled.primal_stabilizer_parts()["R"]
    assert spla.norm(r_scaled - 20.0 * r_base) < 1e-12 * spla.norm(r_scaled)
    g = lambda t, x: np.ones(len(x))  # noqa: E731
    assert scaled.boundary_rhs(g).sum() == pytest.approx(20.0 * base.boundary_rhs(g).sum(), rel=1e-12)


def test_default_weights_use_nitsche_factor_twenty_k_squared():
    setup = ExperimentFactory().build_problem(RunConfig(level=1, k=2, q=2))
    weights = setup.assembler.weights
    assert weights == StabilizationWeights(data=1e4, primal=1e-3, dual=1.0, jump=1.0, boundary=80.0)


def test_time_jump_gradient_term_carries_c_to_the_fourth(tiny_setup):
    base = tiny_setup.assembler

    def jump_with(csq):
        assembler = SaddlePointAssembler(base.primal, base.dual, csq, base.omega_cells > 0, base.weights)
        return assembler.assemble_time_jump_stabilizer()

    ones = np.ones(base.mesh.n_cells)
    # S(c^2) = massa + c^4 rigidez: S(4) - S(1) = 5 (S(2) - S(1))
    four_minus_one = jump_with(4.0 * ones) - jump_with(ones)
    two_minus_one = jump_with(2.0 * ones) - jump_with(ones)
    assert spla.norm(four_minus_one - 5.0 * two_minus_one) < 1e-10 * spla.norm(four_minus_one)
    assert spla.norm(two_minus_one) > 0.0


def test_two_dimensional_polynomial_is_reproduced_by_both_solvers(rng):
    config = RunConfig(
        name="poly2d", dimension=2, solution="polynomial", c1=2.0, level=1, k=1, q=1, final_time=0.5,
        n_slabs=2, gamma_data=1.0, gamma_primal=1.0, boundary_penalty=1.0,
    ).validate()
    setup = ExperimentFactory().build_problem(config)
    system = setup.assembler.assemble_system(setup.data, setup.exact.value)
    layout = system.layout
    assert layout.n_primal == 2 * 2 * 2 * 25

    slabwise = factor(system.matrix, slab_size=layout.slab_size)
    global_lu = factor(system.matrix)
    assert slabwise.inertia == (layout.n_primal, layout.n_dual, 0)

    x, residual = solve_with_residual(slabwise, system.rhs)
    expected, _ = _interpolated_state(setup)
    assert residual < 1e-9
    assert np.abs(x - expected).max() < 1e-8
    assert np.abs(x - solve_with_residual(global_lu, system.rhs)[0]).max() < 1e-8

    primal, dual = split_solution(system, rng.standard_normal(system.size))
    mirrored = layout.from_blocks(primal, -dual)
    quadratic = mirrored @ (system.matrix @ layout.from_blocks(primal, dual))
    assert quadratic == pytest.approx(tnorm_components(system, primal, dual).total, rel=1e-10)
