# Assimilação de dados para a equação da onda com velocidade constante por partes
# Versão: 1.0
# Data: 2026-10-12

__version__ = "1.0.0"
__author__ = "Equipe de Desenvolvimento"
__description__ = "Método espaço-tempo estabilizado (DG no tempo) para continuação única da equação da onda"
