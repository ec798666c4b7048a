"""
ErrorReport / SweepResult - Resultados de execuções e varreduras
Versão: 1.0
Data: 2026-10-14
"""

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

# Cabeçalho dos arquivos CSV das varreduras
CSV_COLUMNS = [
    "L",
    "order",
    "contrast",
    "L-infty-L2-error-u",
    "L2-L2-error-u_t",
    "bestapprox-L-infty-L2-error-u",
    "bestapprox-L2-L2-error-u_t",
]

ERROR_COLUMNS = CSV_COLUMNS[3:]


@dataclass
class ErrorReport:
    """Erros, componentes da norma tripla e diagnósticos de uma execução"""

    label: str
    level: int
    order: int
    contrast: float
    final_time: float
    n_slabs: int
    n_dofs: int
    linfty_l2_u: float
    l2_l2_ut: float
    best_linfty_l2_u: float
    best_l2_l2_ut: float
    t0_l2: float
    tnorm: Dict[str, float] = field(default_factory=dict)
    tnorm_strong: Dict[str, float] = field(default_factory=dict)
    residual: float = 0.0
    gcc_time: Optional[float] = None
    elapsed: float = 0.0

    @property
    def error_ratio(self) -> float:
        """Erro da solução / erro da melhor aproximação (L-infinito L2)"""
        if self.best_linfty_l2_u == 0.0:
            return math.nan
        return self.linfty_l2_u / self.best_linfty_l2_u

    @property
    def gcc_satisfied(self) -> Optional[bool]:
        if self.gcc_time is None:
            return None
        return self.final_time > self.gcc_time

    def is_consistent(self) -> bool:
        """Todas as normas finitas e não negativas"""
        values = [self.linfty_l2_u, self.l2_l2_ut, self.best_linfty_l2_u, self.best_l2_l2_ut, self.t0_l2]
        values += list(self.tnorm.values()) + list(self.tnorm_strong.values())
        return all(math.isfinite(v) and v >= 0.0 for v in values)

    def csv_record(self) -> Dict[str, Any]:
        return {
            "L": self.level,
            "order": self.order,
            "contrast": self.contrast,
            "L-infty-L2-error-u": self.linfty_l2_u,
            "L2-L2-error-u_t": self.l2_l2_ut,
            "bestapprox-L-infty-L2-error-u": self.best_linfty_l2_u,
            "bestapprox-L2-L2-error-u_t": self.best_l2_l2_ut,
        }

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["error_ratio"] = self.error_ratio
        data["gcc_satisfied"] = self.gcc_satisfied
        return data

    def to_json(self) -> str:
        return json.dumps(_finite_or_none(self.to_dict()), ensure_ascii=False, indent=2)


def observed_orders(levels: List[int], errors: List[float]) -> List[float]:
    """
    Ordens observadas entre níveis consecutivos

    Com h = 2^-(L+1), a ordem entre L_a e L_b é log2(e_a / e_b) / (L_b - L_a);
    para níveis consecutivos reduz-se a log2(e_L / e_{L+1}).
    """
    orders = []
    for (la, ea), (lb, eb) in zip(zip(levels, errors), zip(levels[1:], errors[1:])):
        if ea <= 0.0 or eb <= 0.0 or lb == la:
            orders.append(math.nan)
        else:
            orders.append(math.log2(ea / eb) / (lb - la))
    return orders


@dataclass
class SweepResult:
    """Linhas de uma varredura em h ou em contraste, ordenadas por (ordem, contraste, L)"""

    kind: str  # 'refinement' ou 'contrast'
    reports: List[ErrorReport]
    orders: Dict[str, List[float]] = field(default_factory=dict)
    slopes: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        self.reports = sorted(self.reports, key=lambda r: (r.order, r.contrast, r.level))

    @property
    def rows(self) -> List[Dict[str, Any]]:
        return [r.csv_record() for r in self.reports]

    @property
    def levels(self) -> List[int]:
        return [r.level for r in self.reports]

    def column(self, name: str) -> List[float]:
        return [row[name] for row in self.rows]

    def ratios(self) -> List[float]:
        return [r.error_ratio for r in self.reports]

    def compute_orders(self) -> Dict[str, List[float]]:
        self.orders = {name: observed_orders(self.levels, self.column(name)) for name in ERROR_COLUMNS}
        return self.orders

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "rows": self.rows,
            "ratios": self.ratios(),
            "orders": self.orders,
            "slopes": self.slopes,
        }

    def to_json(self) -> str:
        """JSON com NaN (ordens indefinidas) convertidos em null"""
        return json.dumps(_finite_or_none(self.to_dict()), ensure_ascii=False, indent=2)


def _finite_or_none(value):
    if isinstance(value, dict):
        return {k: _finite_or_none(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite_or_none(v) for v in value]
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    return value
