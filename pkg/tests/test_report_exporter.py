import json

from dto import ErrorReport, RunConfig, SweepResult
from exporters import ReportExporter


def _report(level=2, contrast=2.5):
    return ErrorReport(
        label=f"demo_L{level}_k2_c{contrast:g}",
        level=level,
        order=2,
        contrast=contrast,
        final_time=0.5,
        n_slabs=4,
        n_dofs=320,
        linfty_l2_u=1e-3 / 8 ** (level - 2) * contrast,
        l2_l2_ut=2e-3,
        best_linfty_l2_u=5e-4,
        best_l2_l2_ut=1e-3,
        t0_l2=4e-4,
        tnorm={"s_h": 1.0, "jump": 0.1, "omega": 0.2, "dual": 0.0},
        tnorm_strong={"dt_u2": 3.0},
        residual=1e-14,
        gcc_time=0.35,
        elapsed=1.5,
    )


def test_save_run_writes_json_markdown_and_config(tmp_path):
    config = RunConfig(name="demo", k=2, q=2)
    paths = ReportExporter(tmp_path).save_run(_report(), config)
    assert {p.name for p in paths.values()} == {
        "demo_L2_k2_c2.5_report.json",
        "demo_L2_k2_c2.5_report.md",
        "demo_L2_k2_c2.5_config.yaml",
    }
    data = json.loads(paths["json"].read_text(encoding="utf-8"))
    assert data["gcc_satisfied"] is True
    markdown = paths["markdown"].read_text(encoding="utf-8")
    assert "# Execução demo_L2_k2_c2.5" in markdown
    assert "satisfeita" in markdown
    assert "| s_h" in markdown


def test_save_sweep_uses_config_output_for_csv(tmp_path):
    result = SweepResult(kind="refinement", reports=[_report(level=2), _report(level=3)])
    result.compute_orders()
    config = RunConfig(name="demo", output=str(tmp_path / "data" / "fig.csv"))
    paths = ReportExporter(tmp_path / "reports").save_sweep(result, config)
    assert paths["csv"] == tmp_path / "data" / "fig.csv"
    assert paths["config"].name == "fig_config.yaml"
    assert paths["json"].name == "demo_refinement.json"
    markdown = paths["markdown"].read_text(encoding="utf-8")
    assert "Ordens observadas" in markdown
    assert "2->3" in markdown


def test_contrast_sweep_markdown_lists_slopes(tmp_path):
    result = SweepResult(kind="contrast", reports=[_report(contrast=c) for c in (1.0, 2.0)])
    result.slopes = {"L-infty-L2-error-u": 1.0}
    text = ReportExporter(tmp_path).render_sweep(result, RunConfig(name="demo"))
    assert "Inclinações" in text
    assert "Ordens observadas" not in text
