"""
Exportadores - Relatórios JSON e Markdown de execuções e varreduras
Versão: 1.0
Data: 2026-10-16
"""

from .report_exporter import ReportExporter

__all__ = ['ReportExporter']
