"""
CLI - Assimilação de dados para a equação da onda com velocidade por partes
Versão: 1.0
Data: 2026-10-16
Objetivo: Executar o método espaço-tempo estabilizado em execuções únicas e varreduras
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import typer
import yaml
from rich.console import Console
from rich.table import Table

from application.experiment_runner import ExperimentRunner
from dto.run_config import RunConfig
from exporters.report_exporter import ReportExporter
from infrastructure.config_loader import DEFAULT_CONFIG_PATH, ConfigLoader, GlobalSettings
from infrastructure.csv_writer import write_profile_csv
from infrastructure.errors import ConfigurationError, SingularSystemError, WaveUCError

console = Console()
app = typer.Typer(help="Método espaço-tempo estabilizado para continuação única da equação da onda")

DEFAULT_CONTRASTS = "1.0,1.5,2.0,2.5,3.0,3.5,4.0,4.5"

_state: Dict[str, Any] = {"config_path": DEFAULT_CONFIG_PATH}


def configure_logging(level: str = "INFO", log_dir: Path = Path("logs")):
    """Configura o logging (arquivo logs/wave_uc.log + console)"""
    log_dir.mkdir(parents=True, exist_ok=True)
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(log_dir / 'wave_uc.log'),
            logging.StreamHandler()
        ]
    )


@app.callback()
def main(
    config: Path = typer.Option(DEFAULT_CONFIG_PATH, help="Arquivo YAML com seção global e presets"),
):
    """Carrega a configuração global e prepara o logging"""
    _state["config_path"] = config
    try:
        settings = ConfigLoader(config).global_settings()
    except WaveUCError as e:
        console.print(f"[red]Erro: {e}[/red]")
        raise typer.Exit(1)
    _state["settings"] = settings
    configure_logging(settings.log_level)


def _settings() -> GlobalSettings:
    return _state.get("settings") or GlobalSettings()


def _parse_boxes(text: Optional[str]) -> Optional[List]:
    """Caixas em sintaxe YAML/JSON, ex.: '[[[0, 0.3]]]'"""
    if text is None:
        return None
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Lista de caixas inválida '{text}': {e}") from e


def _parse_list(text: str, cast) -> List:
    try:
        return [cast(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigurationError(f"Lista inválida '{text}': {e}") from e


def _resolve(preset: Optional[str], **overrides) -> RunConfig:
    overrides["omega"] = _parse_boxes(overrides.get("omega"))
    overrides["error_region"] = _parse_boxes(overrides.get("error_region"))
    return ConfigLoader(_state["config_path"]).resolve(preset, **overrides)


def _runner() -> ExperimentRunner:
    settings = _settings()
    dump = Path(settings.output_directory) / "matrices" if settings.dump_matrix else None
    return ExperimentRunner(
        console=console,
        max_workers=settings.max_workers,
        parallel=settings.parallel_runs,
        dump_directory=dump,
    )


def _fail(error: Exception):
    console.print(f"[red]Erro: {error}[/red]")
    raise typer.Exit(1)


@app.command()
def run(
    preset: Optional[str] = typer.Option(None, help="Preset do arquivo de configuração"),
    dimension: Optional[int] = typer.Option(None, help="Dimensão espacial (1 ou 2)"),
    solution: Optional[str] = typer.Option(None, help="simple, multijump, zero ou polynomial"),
    c1: Optional[float] = typer.Option(None, help="Velocidade no subdomínio esquerdo"),
    p1: Optional[float] = typer.Option(None, help="Primeira interface da solução multijump"),
    n_wave: Optional[int] = typer.Option(None, help="Inteiro n da fórmula de p2"),
    omega: Optional[str] = typer.Option(None, help="Caixas de omega, ex.: '[[[0, 0.3]]]'"),
    error_region: Optional[str] = typer.Option(None, help="Caixas da região de erro"),
    final_time: Optional[float] = typer.Option(None, help="Tempo final T"),
    level: Optional[int] = typer.Option(None, help="Nível de refinamento L"),
    k: Optional[int] = typer.Option(None, help="Grau espacial primal"),
    q: Optional[int] = typer.Option(None, help="Grau temporal primal"),
    k_dual: Optional[int] = typer.Option(None, help="Grau espacial dual (padrão k)"),
    q_dual: Optional[int] = typer.Option(None, help="Grau temporal dual (padrão q)"),
    dt_factor: Optional[float] = typer.Option(None, help="C' na regra dt = C' h"),
    n_slabs: Optional[int] = typer.Option(None, help="Número de fatias fixo (ignora dt_factor)"),
    solver: Optional[str] = typer.Option(None, help="auto, global ou slabwise"),
    output: Optional[str] = typer.Option(None, help="Diretório de saída dos relatórios"),
):
    """Executa uma resolução e grava os relatórios JSON/Markdown"""
    try:
        config = _resolve(
            preset, dimension=dimension, solution=solution, c1=c1, p1=p1, n_wave=n_wave, omega=omega,
            error_region=error_region, final_time=final_time, level=level, k=k, q=q, k_dual=k_dual,
            q_dual=q_dual, dt_factor=dt_factor, n_slabs=n_slabs, solver=solver, output=output,
        )
        report = _runner().run_single(config)
    except (WaveUCError, SingularSystemError) as e:
        _fail(e)

    table = Table(title=f"Execução {report.label}")
    table.add_column("Norma", style="cyan")
    table.add_column("Solução", style="magenta")
    table.add_column("Melhor aproximação", style="green")
    table.add_row("L-infty-L2 u", f"{report.linfty_l2_u:.6e}", f"{report.best_linfty_l2_u:.6e}")
    table.add_row("L2-L2 u_t", f"{report.l2_l2_ut:.6e}", f"{report.best_l2_l2_ut:.6e}")
    console.print(table)
    console.print(f"Resíduo relativo: {report.residual:.2e}")

    paths = ReportExporter(Path(config.output or _settings().output_directory)).save_run(report, config)
    console.print(f"[green]Relatório salvo em: {paths['markdown'].parent}[/green]")


@app.command("sweep-h")
def sweep_h(
    preset: Optional[str] = typer.Option(None, help="Preset do arquivo de configuração"),
    levels: str = typer.Option("1,2,3,4", help="Níveis L separados por vírgula"),
    c1: Optional[float] = typer.Option(None, help="Velocidade no subdomínio esquerdo"),
    final_time: Optional[float] = typer.Option(None, help="Tempo final T"),
    k: Optional[int] = typer.Option(None, help="Grau espacial primal"),
    q: Optional[int] = typer.Option(None, help="Grau temporal primal"),
    n_slabs: Optional[int] = typer.Option(None, help="Número de fatias fixo"),
    output: Optional[str] = typer.Option(None, help="Arquivo CSV de saída"),
):
    """Varredura de refinamento em L com ordens observadas"""
    try:
        config = _resolve(preset, c1=c1, final_time=final_time, k=k, q=q, n_slabs=n_slabs, output=output)
        result = _runner().run_refinement_sweep(config, _parse_list(levels, int))
    except (WaveUCError, SingularSystemError) as e:
        _fail(e)

    table = Table(title=f"Refinamento - {config.name}")
    table.add_column("L", style="cyan")
    table.add_column("L-infty-L2-error-u", style="magenta")
    table.add_column("L2-L2-error-u_t", style="magenta")
    table.add_column("ordem", style="green")
    orders = [None] + result.orders.get("L-infty-L2-error-u", [])
    for row, order in zip(result.rows, orders):
        table.add_row(
            str(row["L"]),
            f"{row['L-infty-L2-error-u']:.4e}",
            f"{row['L2-L2-error-u_t']:.4e}",
            "-" if order is None else f"{order:.2f}",
        )
    console.print(table)
    paths = ReportExporter(Path(_settings().output_directory)).save_sweep(result, config)
    console.print(f"[green]CSV salvo em: {paths['csv']}[/green]")


@app.command("sweep-contrast")
def sweep_contrast(
    preset: Optional[str] = typer.Option(None, help="Preset do arquivo de configuração"),
    contrasts: str = typer.Option(DEFAULT_CONTRASTS, help="Valores de c1 separados por vírgula"),
    level: Optional[int] = typer.Option(None, help="Nível de refinamento L"),
    k: Optional[int] = typer.Option(None, help="Grau espacial primal"),
    final_time: Optional[float] = typer.Option(None, help="Tempo final T"),
    adapt_time: bool = typer.Option(False, help="T logo acima de 0.25 (1 + 1/c1) para cada c1"),
    output: Optional[str] = typer.Option(None, help="Arquivo CSV de saída"),
):
    """Varredura em c1 com inclinações log-log"""
    try:
        config = _resolve(preset, level=level, k=k, final_time=final_time, output=output)
        result = _runner().run_contrast_sweep(config, _parse_list(contrasts, float), adapt_time)
    except (WaveUCError, SingularSystemError) as e:
        _fail(e)

    table = Table(title=f"Contraste - {config.name}")
    table.add_column("c1", style="cyan")
    table.add_column("L-infty-L2-error-u", style="magenta")
    table.add_column("bestapprox", style="green")
    table.add_column("razão", style="yellow")
    for report in result.reports:
        table.add_row(
            f"{report.contrast:g}",
            f"{report.linfty_l2_u:.4e}",
            f"{report.best_linfty_l2_u:.4e}",
            f"{report.error_ratio:.3f}",
        )
    console.print(table)
    for name, slope in result.slopes.items():
        console.print(f"  inclinação {name}: {slope:.3f}")
    paths = ReportExporter(Path(_settings().output_directory)).save_sweep(result, config)
    console.print(f"[green]CSV salvo em: {paths['csv']}[/green]")


@app.command()
def gcc(
    preset: Optional[str] = typer.Option(None, help="Preset do arquivo de configuração"),
    solution: Optional[str] = typer.Option(None, help="simple ou multijump"),
    c1: Optional[float] = typer.Option(None, help="Velocidade no subdomínio esquerdo"),
    p1: Optional[float] = typer.Option(None, help="Primeira interface da solução multijump"),
    n_wave: Optional[int] = typer.Option(None, help="Inteiro n da fórmula de p2"),
    omega: Optional[str] = typer.Option(None, help="Caixas de omega, ex.: '[[[0, 0.3]]]'"),
    final_time: Optional[float] = typer.Option(None, help="T a comparar com o limiar"),
):
    """Calcula o tempo mínimo de observação T_min = 2 sup dist_c(x, omega)"""
    try:
        config = _resolve(
            preset, solution=solution, c1=c1, p1=p1, n_wave=n_wave, omega=omega, final_time=final_time
        )
        report = _runner().gcc_query(config)
    except (WaveUCError, SingularSystemError) as e:
        _fail(e)

    table = Table(title="Condição de controle geométrico")
    table.add_column("Quantidade", style="cyan")
    table.add_column("Valor", style="green")
    table.add_row("T_min", f"{report.t_min:.12g}")
    table.add_row("ponto mais distante", f"{report.farthest_point:.6f}")
    table.add_row("distância máxima", f"{report.max_distance:.6f}")
    status = "[green]satisfeita[/green]" if report.satisfied_by(config.final_time) else "[red]violada[/red]"
    table.add_row(f"T = {config.final_time:g}", status)
    console.print(table)


@app.command()
def profile(
    preset: Optional[str] = typer.Option(None, help="Preset do arquivo de configuração"),
    time: Optional[float] = typer.Option(None, help="Instante do perfil (padrão profile_time)"),
    points: int = typer.Option(201, help="Número de pontos em x"),
    level: Optional[int] = typer.Option(None, help="Nível de refinamento L"),
    c1: Optional[float] = typer.Option(None, help="Velocidade no subdomínio esquerdo"),
    final_time: Optional[float] = typer.Option(None, help="Tempo final T"),
    output: Optional[str] = typer.Option(None, help="Arquivo CSV de saída"),
):
    """Grava o perfil x, y, y_dt, L da solução discreta e da exata num instante"""
    try:
        config = _resolve(preset, level=level, c1=c1, final_time=final_time)
        t = config.profile_time if time is None else time
        frame = _runner().export_profile(config, t, points)
    except (WaveUCError, SingularSystemError) as e:
        _fail(e)

    path = Path(output) if output else Path(_settings().output_directory) / f"{config.name}_profile_t{t:g}.csv"
    write_profile_csv(frame, path)
    console.print(f"[green]Perfil salvo em: {path}[/green]")


@app.command("list-experiments")
def list_experiments():
    """Lista os presets do arquivo de configuração"""
    loader = ConfigLoader(_state["config_path"])
    table = Table(title=f"Experimentos em {loader.path}")
    table.add_column("Nome", style="cyan")
    table.add_column("Solução", style="magenta")
    table.add_column("Dim", style="magenta")
    table.add_column("Ativo", style="yellow")
    table.add_column("Descrição", style="green")
    for entry in loader.presets(include_disabled=True):
        table.add_row(
            str(entry.get("name", "?")),
            str(entry.get("solution", "simple")),
            str(entry.get("dimension", 1)),
            "sim" if entry.get("enabled", True) else "não",
            str(entry.get("description", "")),
        )
    console.print(table)


if __name__ == "__main__":
    app()
