"""
Exportador de relatórios - JSON + Markdown (jinja2) de execuções e varreduras
Versão: 1.0
Data: 2026-10-16
"""

import logging
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional

from jinja2 import Template
from tabulate import tabulate

from dto.error_report import ERROR_COLUMNS, ErrorReport, SweepResult
from dto.run_config import RunConfig
from infrastructure.config_loader import write_resolved_config
from infrastructure.csv_writer import write_sweep_csv

RUN_TEMPLATE = """
# Execução {{ report.label }}

**Data:** {{ date }}
**Solução:** {{ config.solution }} ({{ config.dimension }}D)
**L / k / q:** {{ report.level }} / {{ config.k }} / {{ config.q }}
**Contraste c1/c2:** {{ report.contrast }}
**T:** {{ report.final_time }} ({{ report.n_slabs }} fatias)
**Incógnitas:** {{ report.n_dofs }}
{% if report.gcc_time is not none %}**T_min (GCC):** {{ "%.6f"|format(report.gcc_time) }} - {{ "satisfeita" if report.gcc_satisfied else "violada" }}
{% endif %}

## Erros

{{ errors_table }}

## Norma tripla

{{ tnorm_table }}

## Diagnósticos

- Resíduo relativo do solver: {{ "%.3e"|format(report.residual) }}
- Erro L2 em t = 0+: {{ "%.6e"|format(report.t0_l2) }}
- Tempo total: {{ "%.2f"|format(report.elapsed) }} s
"""

SWEEP_TEMPLATE = """
# Varredura ({{ result.kind }}) - {{ config.name }}

**Data:** {{ date }}
**Linhas:** {{ result.reports|length }}

## Resultados

{{ rows_table }}

{% if orders_table %}
## Ordens observadas

{{ orders_table }}
{% endif %}
{% if slopes_table %}
## Inclinações log-log em c1

{{ slopes_table }}
{% endif %}
"""


class ReportExporter:
    """Grava JSON, Markdown, CSV e a configuração resolvida no diretório de saída"""

    def __init__(self, output_dir: Path):
        self.output_dir = Path(output_dir)
        self.logger = logging.getLogger(__name__)

    def _prepare(self) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self.output_dir

    def save_run(self, report: ErrorReport, config: RunConfig) -> Dict[str, Path]:
        """Salva <label>_report.json, <label>_report.md e <label>_config.yaml"""
        out = self._prepare()
        json_path = out / f"{report.label}_report.json"
        json_path.write_text(report.to_json(), encoding="utf-8")
        md_path = out / f"{report.label}_report.md"
        md_path.write_text(self.render_run(report, config), encoding="utf-8")
        config_path = write_resolved_config(config, out / f"{report.label}_config.yaml")
        self.logger.info(f"Relatório salvo em: {out}")
        return {"json": json_path, "markdown": md_path, "config": config_path}

    def render_run(self, report: ErrorReport, config: RunConfig) -> str:
        errors = [
            ["L-infty-L2 u", report.linfty_l2_u, report.best_linfty_l2_u],
            ["L2-L2 u_t", report.l2_l2_ut, report.best_l2_l2_ut],
        ]
        errors_table = tabulate(
            errors, headers=["Norma", "Solução", "Melhor aproximação"], tablefmt="github", floatfmt=".6e"
        )
        tnorm_rows = [[name, value] for name, value in {**report.tnorm, **report.tnorm_strong}.items()]
        tnorm_table = tabulate(tnorm_rows, headers=["Parcela", "Valor"], tablefmt="github", floatfmt=".6e")
        return Template(RUN_TEMPLATE).render(
            report=report,
            config=config,
            date=datetime.now().strftime("%Y-%m-%d %H:%M:%S"),
            errors_table=errors_table,
            tnorm_table=tnorm_table,
        )

    def save_sweep(self, result: SweepResult, config: RunConfig, stem: Optional[str] = None) -> Dict[str, Path]:
        """Salva CSV no esquema fixo, JSON com ordens/inclinações, Markdown e configuração"""
        out = self._prepare()
        stem = stem or f"{config.name}_{result.kind}"
        csv_path = write_sweep_csv(result, Path(config.output) if config.output else out / f"{stem}.csv")
        json_path = out / f"{stem}.json"
        json_path.write_text(result.to_json(), encoding="utf-8")
        md_path = out / f"{stem}.md"
        md_path.write_text(self.render_sweep(result, config), encoding="utf-8")
        config_path = write_resolved_config(config, csv_path.with_name(f"{csv_path.stem}_config.yaml"))
        return {"csv": csv_path, "json": json_path, "markdown": md_path, "config": config_path}

    def render_sweep(self, result: SweepResult, config: RunConfig) -> str:
        rows_table = tabulate(result.rows, headers="keys", tablefmt="github", floatfmt=".6e")
        orders_table = ""
        if result.orders:
            pairs = [f"{a}->{b}" for a, b in zip(result.levels, result.levels[1:])]
            table: List[List] = [[name] + list(result.orders[name]) for name in ERROR_COLUMNS]
            orders_table = tabulate(table, headers=["Coluna"] + pairs, tablefmt="github", floatfmt=".3f")
        slopes_table = ""
        if result.slopes:
            slopes_table = tabulate(
                list(result.slopes.items()), headers=["Série", "Inclinação"], tablefmt="github", floatfmt=".3f"
            )
        return Template(SWEEP_TEMPLATE).render(
            result=result,
            config=config,
            date=datetime.now().strftime("%Y-%m-%d %H:%M:%S"),
            rows_table=rows_table,
            orders_table=orders_table,
            slopes_table=slopes_table,
        )
