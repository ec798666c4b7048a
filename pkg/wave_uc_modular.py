#!/usr/bin/env python3
"""
Assimilação de dados para a equação da onda - Ponto de entrada
Versão: 1.0
Data: 2026-10-16
Objetivo: Continuação única espaço-tempo com velocidade constante por partes
"""

import sys
from pathlib import Path

# Adicionar src ao path para imports
sys.path.insert(0, str(Path(__file__).parent / 'src'))

from wave_uc_cli import app  # noqa: E402

if __name__ == "__main__":
    app()
