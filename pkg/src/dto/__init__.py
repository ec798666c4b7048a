"""
DTOs - Configuração de execução e relatórios de erro
Versão: 1.0
Data: 2026-10-14
"""

from .run_config import RunConfig, SolutionKind
from .error_report import CSV_COLUMNS, ERROR_COLUMNS, ErrorReport, SweepResult, observed_orders

__all__ = [
    'RunConfig',
    'SolutionKind',
    'CSV_COLUMNS',
    'ERROR_COLUMNS',
    'ErrorReport',
    'SweepResult',
    'observed_orders'
]
