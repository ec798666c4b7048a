import io
import math

import pytest
from rich.console import Console

from application.experiment_runner import (
    ExperimentRunner,
    adapted_final_time,
    contrast_slopes,
    run_label,
)
from dto import ErrorReport, RunConfig, SweepResult
from experiment_factory import ExperimentFactory
from infrastructure.errors import ConfigurationError, MeshError


@pytest.fixture
def runner(tmp_path):
    console = Console(file=io.StringIO())
    return ExperimentRunner(console=console, max_workers=2, parallel=False)


def _poly(**overrides):
    base = RunConfig(
        name="poly", solution="polynomial", c1=2.0, level=1, k=1, q=1, final_time=0.5,
        gamma_data=1.0, gamma_primal=1.0, boundary_penalty=1.0,
    )
    return base.with_overrides(**overrides).validate()


def test_labels_and_adapted_time():
    assert run_label(RunConfig(name="fig", level=3, k=2, c1=2.5)) == "fig_L3_k2_c2.5"
    assert adapted_final_time(2.5) == pytest.approx(0.36)
    assert adapted_final_time(1.0, margin=0.0) == pytest.approx(0.5)


def test_run_single_reproduces_discrete_solution(runner):
    report = runner.run_single(_poly())
    assert report.linfty_l2_u < 1e-8
    assert report.l2_l2_ut < 1e-8
    assert report.best_linfty_l2_u < 1e-10
    assert report.residual < 1e-9
    assert report.n_dofs == 80
    assert report.n_slabs == 2
    assert report.gcc_time == pytest.approx(0.375)
    assert report.is_consistent()


def test_run_single_simple_solution(runner):
    config = RunConfig(name="simple", c1=2.5, level=1, k=2, q=2, final_time=0.5).validate()
    report = runner.run_single(config)
    assert report.contrast == 2.5
    assert report.gcc_time == pytest.approx(0.35)
    assert report.gcc_satisfied
    assert 0.0 < report.best_linfty_l2_u
    assert report.residual < 1e-9
    assert set(report.tnorm) == {"s_h", "jump", "omega", "dual"}


def test_refinement_sweep(runner):
    result = runner.run_refinement_sweep(_poly(solution="simple", c1=1.0), [1, 2])
    assert result.levels == [1, 2]
    assert len(result.orders["L-infty-L2-error-u"]) == 1
    assert all(r.residual < 1e-9 for r in result.reports)


def test_refinement_sweep_rejects_repeated_levels(runner):
    with pytest.raises(ConfigurationError):
        runner.run_refinement_sweep(_poly(), [1, 1])


def test_parallel_contrast_sweep_with_adapted_time(tmp_path):
    console = Console(file=io.StringIO())
    runner = ExperimentRunner(console=console, max_workers=2, parallel=True)
    result = runner.run_contrast_sweep(_poly(solution="simple"), [2.0, 1.0], adapt_time=True)
    assert [r.contrast for r in result.reports] == [1.0, 2.0]
    assert [r.final_time for r in result.reports] == pytest.approx([0.51, 0.385])
    assert set(result.slopes) == {
        "L-infty-L2-error-u",
        "L2-L2-error-u_t",
        "bestapprox-L-infty-L2-error-u",
        "bestapprox-L2-L2-error-u_t",
        "ratio",
    }


def test_contrast_slopes_on_synthetic_data():
    reports = [
        ErrorReport(
            label=f"c{c}",
            level=3,
            order=3,
            contrast=c,
            final_time=0.5,
            n_slabs=16,
            n_dofs=1,
            linfty_l2_u=1e-4 * c**3,
            l2_l2_ut=1e-3 * c**3,
            best_linfty_l2_u=1e-5 * c**2,
            best_l2_l2_ut=0.0,
            t0_l2=0.0,
        )
        for c in (1.0, 1.5, 2.0, 3.0)
    ]
    slopes = contrast_slopes(SweepResult(kind="contrast", reports=reports))
    assert slopes["L-infty-L2-error-u"] == pytest.approx(3.0)
    assert slopes["bestapprox-L-infty-L2-error-u"] == pytest.approx(2.0)
    assert slopes["ratio"] == pytest.approx(1.0)
    assert math.isnan(slopes["bestapprox-L2-L2-error-u_t"])


def test_gcc_query(runner):
    assert runner.gcc_query(RunConfig(c1=2.5)).t_min == pytest.approx(0.35, abs=1e-12)
    one_sided = RunConfig(solution="multijump", c1=7.5, p1=0.4, n_wave=3, omega=[[[0.0, 0.3]]])
    assert runner.gcc_query(one_sided).t_min == pytest.approx(0.649, abs=0.01)


def test_error_at_time_is_relative(runner):
    error = runner.error_at_time(_poly(), 0.25)
    assert 0.0 <= error < 1e-8


def test_export_profile(runner):
    frame = runner.export_profile(_poly(), 0.3, n_points=11)
    assert frame.columns.tolist() == ["x", "y", "y_dt", "L", "y_exact", "y_dt_exact"]
    assert len(frame) == 11
    assert (frame["y"] - frame["y_exact"]).abs().max() < 1e-8
    assert (frame["y_dt"] - frame["y_dt_exact"]).abs().max() < 1e-7


def test_solve_wraps_errors_with_run_label(runner):
    config = RunConfig(name="bad", dimension=2, level=1, k=1, q=1, final_time=0.25, omega=[[[0.0, 0.3], [0.0, 1.0]]])
    with pytest.raises(MeshError, match="^run bad_L1_k1_c2.5: "):
        runner.solve(config.validate())


def test_matrix_dump_directory(tmp_path):
    console = Console(file=io.StringIO())
    runner = ExperimentRunner(console=console, parallel=False, dump_directory=tmp_path / "matrices")
    runner.solve(_poly())
    assert (tmp_path / "matrices" / "poly_L1_k1_c2_matrix.txt").exists()


def test_factory_registry():
    factory = ExperimentFactory()
    assert set(factory.get_supported_solutions()) == {"simple", "multijump", "zero", "polynomial"}
    info = factory.get_solution_info(RunConfig(solution="multijump", c1=7.5, p1=0.4, n_wave=3))
    assert info["interfaces"][1] == pytest.approx(2.0 / 3.0)
    assert info["contrast"] == pytest.approx(7.5)

    setup = factory.build_problem(RunConfig(solution="multijump", c1=7.5, p1=0.4, n_wave=3, level=1, k=1, q=1))
    assert setup.mesh.has_vertex(2.0 / 3.0)
    assert setup.dual.spatial is setup.primal.spatial

    richer = factory.build_problem(RunConfig(level=1, k=1, q=1, k_dual=2, q_dual=0))
    assert richer.dual.spatial.degree == 2
    assert richer.dual.time_degree == 0
