"""
Exceções do solver de assimilação de dados para a equação da onda
Versão: 1.0
Data: 2026-10-12
"""

from typing import Optional


class WaveUCError(ValueError):
    """Erro base de todos os módulos do projeto"""


class MeshError(WaveUCError):
    """Parâmetros de malha inválidos (nível, pontos fora de (0,1), malha não ajustada)"""


class QuadratureError(WaveUCError):
    """Ordem de regra de quadratura fora do intervalo suportado"""


class SpaceError(WaveUCError):
    """Avaliação fora do domínio ou traço temporal inválido"""


class ConfigurationError(WaveUCError):
    """Configuração de execução inconsistente"""


class AssemblyError(WaveUCError):
    """Dimensões incompatíveis durante a montagem"""


class SingularSystemError(RuntimeError):
    """Falha na fatoração do sistema de ponto de sela"""

    def __init__(self, message: str, equation_index: Optional[int] = None):
        if equation_index is not None:
            message = f"{message} (equação {equation_index})"
        super().__init__(message)
        self.equation_index = equation_index
