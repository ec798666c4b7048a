import json
import math

import pytest

from dto import CSV_COLUMNS, ErrorReport, RunConfig, SolutionKind, SweepResult, observed_orders
from dto.run_config import DEFAULT_OMEGA_1D, DEFAULT_OMEGA_2D
from infrastructure.errors import ConfigurationError


def _report(level=1, order=2, contrast=2.5, error=1e-2, best=5e-3, **extra):
    values = dict(
        label=f"r_L{level}",
        level=level,
        order=order,
        contrast=contrast,
        final_time=0.5,
        n_slabs=4,
        n_dofs=100,
        linfty_l2_u=error,
        l2_l2_ut=2 * error,
        best_linfty_l2_u=best,
        best_l2_l2_ut=2 * best,
        t0_l2=error / 2,
    )
    values.update(extra)
    return ErrorReport(**values)


def test_default_config_is_valid():
    config = RunConfig().validate()
    assert config.kind is SolutionKind.SIMPLE
    assert config.resolved_omega == DEFAULT_OMEGA_1D
    assert config.resolved_k_dual == config.k
    assert config.resolved_q_dual == config.q


def test_default_stabilization_and_solver():
    config = RunConfig(k=3)
    assert (config.gamma_data, config.gamma_primal, config.gamma_dual, config.gamma_jump) == (1e4, 1e-3, 1.0, 1.0)
    assert config.nitsche_penalty == pytest.approx(180.0)
    assert config.resolved_solver == "global"
    assert RunConfig(dimension=2).resolved_solver == "slabwise"
    assert RunConfig(dimension=2, solver="global").resolved_solver == "global"


def test_two_dimensional_default_omega():
    config = RunConfig(dimension=2, level=1).validate()
    assert config.resolved_omega == DEFAULT_OMEGA_2D
    assert len(config.resolved_omega) == 4


@pytest.mark.parametrize(
    "overrides",
    [
        {"dimension": 3},
        {"solution": "unknown"},
        {"dimension": 2, "solution": "multijump", "level": 1},
        {"c1": 0.0},
        {"k": 0},
        {"q_dual": -1},
        {"final_time": 0.0},
        {"dimension": 2, "level": 0},
        {"dt_factor": -1.0},
        {"n_slabs": 0},
        {"omega": []},
        {"omega": [[[0.0, 0.25], [0.0, 1.0]]]},
        {"gamma_jump": 0.0},
        {"solver": "cholesky"},
    ],
)
def test_invalid_configurations(overrides):
    with pytest.raises(ConfigurationError):
        RunConfig(**overrides).validate()


def test_slab_count():
    assert RunConfig(final_time=0.5).slab_count(0.125) == 4
    assert RunConfig(final_time=0.5, dt_factor=2.0).slab_count(0.125) == 2
    assert RunConfig(final_time=0.01).slab_count(0.125) == 1
    assert RunConfig(final_time=1.0, n_slabs=32).slab_count(0.5) == 32


def test_overrides_and_dict_conversion():
    config = RunConfig(name="base", c1=2.5)
    changed = config.with_overrides(c1=4.0, k=None)
    assert changed.c1 == 4.0
    assert changed.k == config.k
    assert config.c1 == 2.5
    with pytest.raises(ConfigurationError):
        config.with_overrides(speed=1.0)

    assert RunConfig.from_dict(config.to_dict()) == config
    assert json.loads(config.to_json())["name"] == "base"
    with pytest.raises(ConfigurationError):
        RunConfig.from_dict({"name": "x", "colour": "red"})


def test_observed_orders():
    assert observed_orders([1, 2, 3], [1e-1, 1.25e-2, 1.5625e-3]) == pytest.approx([3.0, 3.0])
    assert observed_orders([1, 3], [1e-1, 2.5e-2]) == pytest.approx([1.0])
    assert math.isnan(observed_orders([1, 2], [0.0, 1e-3])[0])
    assert observed_orders([1], [1e-2]) == []


def test_error_report_derived_values():
    report = _report(gcc_time=0.35)
    assert report.error_ratio == pytest.approx(2.0)
    assert report.gcc_satisfied is True
    assert _report(gcc_time=0.7).gcc_satisfied is False
    assert _report().gcc_satisfied is None
    assert report.is_consistent()
    assert not _report(error=float("nan")).is_consistent()
    assert list(report.csv_record()) == CSV_COLUMNS


def test_error_report_json_has_no_nan():
    report = _report(best=0.0)
    data = json.loads(report.to_json())
    assert data["error_ratio"] is None
    assert data["label"] == "r_L1"


def test_sweep_result_sorting_and_orders():
    reports = [
        _report(level=3, error=1.25e-3),
        _report(level=1, error=8e-2),
        _report(level=2, error=1e-2),
        _report(level=1, order=1, error=1e-1),
    ]
    result = SweepResult(kind="refinement", reports=reports)
    assert [(r.order, r.level) for r in result.reports] == [(1, 1), (2, 1), (2, 2), (2, 3)]

    single = SweepResult(kind="refinement", reports=reports[:3])
    orders = single.compute_orders()
    assert orders["L-infty-L2-error-u"] == pytest.approx([3.0, 3.0])
    assert set(orders) == set(CSV_COLUMNS[3:])
    data = json.loads(single.to_json())
    assert data["kind"] == "refinement"
    assert len(data["rows"]) == 3
    assert data["ratios"] == pytest.approx([r.error_ratio for r in single.reports])
