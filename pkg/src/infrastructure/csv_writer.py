"""
Escrita e leitura dos CSV de varreduras e perfis (pandas)
Versão: 1.0
Data: 2026-10-15
"""

import logging
from pathlib import Path

import pandas as pd

from dto.error_report import CSV_COLUMNS, SweepResult
from infrastructure.errors import ConfigurationError

logger = logging.getLogger(__name__)

# 12 algarismos significativos
FLOAT_FORMAT = "%.12g"


def sweep_frame(result: SweepResult) -> pd.DataFrame:
    """Tabela da varredura com as colunas na ordem do esquema"""
    frame = pd.DataFrame(result.rows, columns=CSV_COLUMNS)
    return frame.astype({"L": int, "order": int})


def write_sweep_csv(result: SweepResult, path: Path) -> Path:
    """Grava a varredura com o cabeçalho fixo e 12 algarismos significativos"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    sweep_frame(result).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info(f"CSV gravado: {path} ({len(result.rows)} linhas)")
    return path


def read_sweep_csv(path: Path) -> pd.DataFrame:
    frame = pd.read_csv(path)
    missing = [c for c in CSV_COLUMNS if c not in frame.columns]
    if missing:
        raise ConfigurationError(f"Colunas ausentes em {path}: {missing}")
    return frame


def write_profile_csv(frame: pd.DataFrame, path: Path) -> Path:
    """Grava um perfil (x, y, y_dt, L) com o mesmo formato numérico"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path
