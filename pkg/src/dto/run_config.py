"""
RunConfig - Parâmetros de uma execução do método espaço-tempo
Versão: 1.0
Data: 2026-10-14
"""

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from enum import Enum
from typing import Any, Dict, List, Optional

from infrastructure.errors import ConfigurationError


class SolutionKind(Enum):
    """Soluções de referência disponíveis"""

    SIMPLE = "simple"
    MULTIJUMP = "multijump"
    ZERO = "zero"
    POLYNOMIAL = "polynomial"


SOLVERS = ("auto", "global", "slabwise")

# omega padrão: [0, 0.25] U [0.75, 1] em 1D, Omega menos [0.25, 0.75]^2 em 2D
DEFAULT_OMEGA_1D = [[[0.0, 0.25]], [[0.75, 1.0]]]
DEFAULT_OMEGA_2D = [
    [[0.0, 0.25], [0.0, 1.0]],
    [[0.75, 1.0], [0.0, 1.0]],
    [[0.25, 0.75], [0.0, 0.25]],
    [[0.25, 0.75], [0.75, 1.0]],
]


@dataclass
class RunConfig:
    """Configuração completa de uma execução (preset YAML + sobrescritas da CLI)"""

    name: str = "run"
    dimension: int = 1
    solution: str = SolutionKind.SIMPLE.value
    c1: float = 2.5
    c2: float = 1.0
    p1: float = 0.5
    n_wave: int = 1
    w1: float = 3.0 * math.pi
    omega: Optional[List[Any]] = None
    final_time: float = 0.5
    level: int = 2
    k: int = 2
    q: int = 2
    k_dual: Optional[int] = None
    q_dual: Optional[int] = None
    dt_factor: float = 1.0
    n_slabs: Optional[int] = None
    error_region: Optional[List[Any]] = None
    output: Optional[str] = None
    gamma_data: float = 1e4
    gamma_primal: float = 1e-3
    gamma_dual: float = 1.0
    gamma_jump: float = 1.0
    boundary_penalty: float = 20.0  # lambda de Nitsche = boundary_penalty * k^2
    solver: str = "auto"
    profile_time: float = 0.0

    @property
    def resolved_omega(self) -> List[Any]:
        if self.omega is not None:
            return self.omega
        default = DEFAULT_OMEGA_1D if self.dimension == 1 else DEFAULT_OMEGA_2D
        return [[list(interval) for interval in box] for box in default]

    @property
    def resolved_k_dual(self) -> int:
        return self.k if self.k_dual is None else self.k_dual

    @property
    def resolved_q_dual(self) -> int:
        return self.q if self.q_dual is None else self.q_dual

    @property
    def nitsche_penalty(self) -> float:
        """Fator lambda que multiplica h^-1 nos termos de fronteira de S_h, S* e do lado direito"""
        return self.boundary_penalty * self.k**2

    @property
    def resolved_solver(self) -> str:
        """auto: fatoração global em 1D, eliminação fatia a fatia em 2D"""
        if self.solver != "auto":
            return self.solver
        return "global" if self.dimension == 1 else "slabwise"

    @property
    def kind(self) -> SolutionKind:
        return SolutionKind(self.solution)

    def slab_count(self, h: float) -> int:
        """N pela regra dt = C' h (N = max(1, round(T / (C' h)))) ou o N explícito"""
        if self.n_slabs is not None:
            return self.n_slabs
        return max(1, int(round(self.final_time / (self.dt_factor * h))))

    def validate(self) -> "RunConfig":
        """
        Verifica a consistência da configuração

        Raises:
            ConfigurationError: na primeira inconsistência encontrada
        """
        if self.dimension not in (1, 2):
            raise ConfigurationError(f"dimension deve ser 1 ou 2: {self.dimension}")
        try:
            kind = self.kind
        except ValueError:
            valid = ", ".join(k.value for k in SolutionKind)
            raise ConfigurationError(f"Solução desconhecida '{self.solution}' (válidas: {valid})") from None
        if self.dimension == 2 and kind == SolutionKind.MULTIJUMP:
            raise ConfigurationError("Solução multijump disponível apenas em 1D")
        if self.c1 <= 0 or self.c2 <= 0:
            raise ConfigurationError(f"Velocidades devem ser positivas: c1={self.c1}, c2={self.c2}")
        if self.k < 1 or self.q < 1:
            raise ConfigurationError(f"Graus primais devem ser >= 1: k={self.k}, q={self.q}")
        if self.resolved_k_dual < 1 or self.resolved_q_dual < 0:
            raise ConfigurationError(
                f"Graus duais inválidos: k*={self.resolved_k_dual}, q*={self.resolved_q_dual}"
            )
        if self.final_time <= 0:
            raise ConfigurationError(f"final_time deve ser positivo: {self.final_time}")
        if self.level < (1 if self.dimension == 2 else 0):
            raise ConfigurationError(f"Nível L={self.level} inválido para {self.dimension}D")
        if self.dt_factor <= 0:
            raise ConfigurationError(f"dt_factor deve ser positivo: {self.dt_factor}")
        if self.n_slabs is not None and self.n_slabs < 1:
            raise ConfigurationError(f"n_slabs deve ser >= 1: {self.n_slabs}")
        if not self.resolved_omega:
            raise ConfigurationError("omega vazio")
        for box in self.resolved_omega + (self.error_region or []):
            if len(box) != self.dimension:
                raise ConfigurationError(f"Caixa {box} não tem {self.dimension} intervalos")
        for name in ("gamma_data", "gamma_primal", "gamma_dual", "gamma_jump", "boundary_penalty"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} deve ser positivo")
        if self.solver not in SOLVERS:
            raise ConfigurationError(f"solver deve ser um de {SOLVERS}: {self.solver}")
        return self

    def with_overrides(self, **overrides) -> "RunConfig":
        """Cópia com sobrescritas (valores None são ignorados)"""
        unknown = set(overrides) - {f.name for f in fields(self)}
        if unknown:
            raise ConfigurationError(f"Chaves desconhecidas: {sorted(unknown)}")
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """Cria a configuração a partir de um dicionário (ex.: preset YAML)"""
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"Chaves desconhecidas na configuração: {sorted(unknown)}")
        return cls(**data)
