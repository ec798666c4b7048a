"""
Quadratura - Regras de Gauss-Legendre em [0,1] e produtos tensoriais
Versão: 1.0
Data: 2026-10-12
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from infrastructure.errors import QuadratureError

MAX_POINTS = 20


@dataclass(frozen=True)
class QuadRule:
    """Regra de quadratura em [0,1]^d: points com shape (n, d), weights com shape (n,)"""

    points: np.ndarray
    weights: np.ndarray

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    def integrate(self, f) -> float:
        """Integra f(points) -> valores (n,) sobre [0,1]^d"""
        return float(np.dot(self.weights, f(self.points)))


@lru_cache(maxsize=None)
def gauss_rule(n: int) -> QuadRule:
    """
    Regra de Gauss-Legendre com n pontos mapeada para [0,1]

    Args:
        n: número de pontos (1 a 20); exata até grau 2n-1

    Returns:
        QuadRule unidimensional
    """
    if not 1 <= n <= MAX_POINTS:
        raise QuadratureError(f"Número de pontos fora de [1, {MAX_POINTS}]: {n}")
    xg, wg = np.polynomial.legendre.leggauss(n)
    points = 0.5 * (xg + 1.0)
    weights = 0.5 * wg
    points.setflags(write=False)
    weights.setflags(write=False)
    return QuadRule(points=points[:, None], weights=weights)


def tensor_rule(rules: Sequence[QuadRule]) -> QuadRule:
    """Produto tensorial de 1 a 3 regras; a primeira regra varia mais rápido"""
    if not 1 <= len(rules) <= 3:
        raise QuadratureError(f"Produto tensorial exige de 1 a 3 fatores, recebido {len(rules)}")
    axes = [r.points[:, 0] for r in rules]
    grids = np.meshgrid(*axes, indexing="ij")
    points = np.column_stack([g.ravel(order="F") for g in grids])
    weight_grids = np.meshgrid(*[r.weights for r in rules], indexing="ij")
    weights = np.prod(np.stack([w.ravel(order="F") for w in weight_grids]), axis=0)
    return QuadRule(points=points, weights=weights)


def volume_rule(dim: int, degree: int) -> QuadRule:
    """Regra de volume com degree + 2 pontos por direção (integrandos da forma bilinear exatos)"""
    return tensor_rule([gauss_rule(degree + 2)] * dim)


def elevated_rule(dim: int, degree: int) -> QuadRule:
    """Regra elevada (degree + 6 pontos por direção) para dados e erros contra soluções exatas"""
    return tensor_rule([gauss_rule(min(degree + 6, MAX_POINTS))] * dim)
