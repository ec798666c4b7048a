"""
Solver - Fatoração esparsa direta (SuperLU) do sistema de ponto de sela
Versão: 1.0
Data: 2026-10-17

Dois modos: LU global da matriz inteira, ou eliminação em blocos fatia a fatia
(algoritmo de Thomas por blocos) para a numeração bloco-tridiagonal do DofLayout.
"""

import logging
import time
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from infrastructure.errors import AssemblyError, SingularSystemError

logger = logging.getLogger(__name__)

# Resíduo relativo acima do qual se faz um passo de refinamento iterativo
REFINEMENT_THRESHOLD = 1e-10

# Inércia só é calculada (LDL^T denso) até esta dimensão
INERTIA_DENSE_LIMIT = 2000

# Colunas por lote na atualização de Schur entre fatias
SCHUR_CHUNK = 512


@dataclass
class Factorization:
    """Fatores reutilizáveis (somente leitura após a construção)"""

    lu: object  # SuperLU ou SlabwiseLU: ambos expõem solve(b)
    matrix: sp.csc_matrix
    permutation: np.ndarray
    factor_time: float
    fill: int  # não nulos de L + U
    inertia: Optional[Tuple[int, int, int]] = None  # (positivos, negativos, nulos)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def _factor_block(matrix: sp.spmatrix, permc_spec: str, offset: int = 0):
    """splu com detecção de pivôs desprezíveis; offset desloca o índice de equação reportado"""
    csc = sp.csc_matrix(matrix, dtype=float)
    try:
        lu = splu(csc, permc_spec=permc_spec)
    except RuntimeError as exc:
        raise SingularSystemError(f"Falha na fatoração: {exc}") from exc

    # Pivôs desprezíveis em relação ao maior indicam sistema numericamente singular
    pivots = np.abs(lu.U.diagonal())
    scale = pivots.max() if pivots.size else 0.0
    small = np.flatnonzero(pivots <= np.finfo(float).eps * scale)
    if scale == 0.0 or small.size:
        position = int(small[0]) if small.size else 0
        equation = offset + int(np.argsort(lu.perm_c)[position])
        raise SingularSystemError("Pivô desprezível na fatoração", equation_index=equation)
    return lu


class SlabwiseLU:
    """
    Eliminação de Gauss por blocos de uma matriz bloco-tridiagonal

    S_0 = D_0 e S_n = D_n - C_n S_{n-1}^-1 U_{n-1}, com D_n o bloco diagonal da
    fatia n, C_n = M[n, n-1] e U_{n-1} = M[n-1, n]. Como C_n só tem linhas nos
    DOFs de início da fatia, a atualização é um bloco denso pequeno.
    """

    def __init__(self, matrix: sp.spmatrix, slab_size: int, permc_spec: str = "COLAMD"):
        size = matrix.shape[0]
        if slab_size <= 0 or size % slab_size:
            raise AssemblyError(f"Tamanho de fatia {slab_size} não divide a dimensão {size}")
        self.slab_size = slab_size
        self.n_slabs = size // slab_size
        csr = sp.csr_matrix(matrix, dtype=float)
        self._check_band(csr)

        self.lower: List[sp.csr_matrix] = []  # lower[n - 1] = M[n, n-1]
        self.upper: List[sp.csr_matrix] = []  # upper[n] = M[n, n+1]
        self.factors = []
        for n in range(self.n_slabs):
            rows = self._range(n)
            diagonal = csr[rows][:, rows]
            if n > 0:
                previous = self._range(n - 1)
                lower = csr[rows][:, previous]
                upper = csr[previous][:, rows]
                diagonal = diagonal - self._schur_update(lower, upper, self.factors[-1])
                self.lower.append(lower)
                self.upper.append(upper)
            self.factors.append(_factor_block(diagonal, permc_spec, offset=n * slab_size))

    def _range(self, n: int) -> slice:
        return slice(n * self.slab_size, (n + 1) * self.slab_size)

    def _check_band(self, csr: sp.csr_matrix) -> None:
        coo = csr.tocoo()
        distance = np.abs(coo.row // self.slab_size - coo.col // self.slab_size)
        if np.any(distance > 1):
            raise AssemblyError("Matriz não é bloco-tridiagonal na numeração por fatias")

    def _schur_update(self, lower: sp.csr_matrix, upper: sp.csr_matrix, previous) -> sp.csr_matrix:
        """C_n S_{n-1}^-1 U_{n-1} restrito às linhas não nulas de C_n e colunas não nulas de U_{n-1}"""
        shape = (self.slab_size, self.slab_size)
        rows = np.unique(lower.nonzero()[0])
        cols = np.unique(upper.nonzero()[1])
        if rows.size == 0 or cols.size == 0:
            return sp.csr_matrix(shape)
        lower_rows = lower[rows]
        upper_cols = upper.tocsc()[:, cols]
        block = np.empty((rows.size, cols.size))
        for start in range(0, cols.size, SCHUR_CHUNK):
            chunk = slice(start, start + SCHUR_CHUNK)
            rhs = np.asfortranarray(upper_cols[:, chunk].toarray())
            block[:, chunk] = lower_rows @ previous.solve(rhs)
        rr, cc = np.meshgrid(rows, cols, indexing="ij")
        return sp.csr_matrix((block.ravel(), (rr.ravel(), cc.ravel())), shape=shape)

    @property
    def perm_c(self) -> np.ndarray:
        return np.concatenate([lu.perm_c + n * self.slab_size for n, lu in enumerate(self.factors)])

    @property
    def fill(self) -> int:
        return int(sum(lu.L.nnz + lu.U.nnz for lu in self.factors))

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Substituição direta e retroativa por blocos"""
        rhs = np.asarray(b, dtype=float).reshape(self.n_slabs, self.slab_size)
        forward = []
        for n in range(self.n_slabs):
            current = rhs[n]
            if n > 0:
                current = current - self.lower[n - 1] @ forward[-1]
            forward.append(self.factors[n].solve(np.ascontiguousarray(current)))
        x = np.empty_like(rhs)
        x[-1] = forward[-1]
        for n in range(self.n_slabs - 2, -1, -1):
            x[n] = forward[n] - self.factors[n].solve(np.ascontiguousarray(self.upper[n] @ x[n + 1]))
        return x.ravel()


def matrix_inertia(matrix: sp.spmatrix) -> Tuple[int, int, int]:
    """
    Inércia (positivos, negativos, nulos) de uma matriz simétrica via LDL^T denso

    Pela lei de Sylvester a inércia de M é a do fator bloco-diagonal D (blocos 1x1 e 2x2).
    """
    dense = sp.csr_matrix(matrix).toarray()
    dense = 0.5 * (dense + dense.T)
    _, d, _ = la.ldl(dense)
    eigenvalues = np.linalg.eigvalsh(d)
    tol = dense.shape[0] * np.finfo(float).eps * max(np.abs(eigenvalues).max(initial=0.0), 1.0)
    positive = int(np.count_nonzero(eigenvalues > tol))
    negative = int(np.count_nonzero(eigenvalues < -tol))
    return positive, negative, dense.shape[0] - positive - negative


def factor(matrix: sp.spmatrix, permc_spec: str = "COLAMD", slab_size: Optional[int] = None) -> Factorization:
    """
    Fatora M com SuperLU e ordenação redutora de preenchimento

    Args:
        matrix: matriz esparsa quadrada (simétrica indefinida no uso normal)
        permc_spec: ordenação de colunas do SuperLU
        slab_size: se dado, eliminação por blocos de fatias desse tamanho (SlabwiseLU)

    Returns:
        Factorization reutilizável; inertia preenchida até INERTIA_DENSE_LIMIT incógnitas

    Raises:
        SingularSystemError: pivô nulo (ou desprezível) durante a eliminação
    """
    if matrix.shape[0] != matrix.shape[1]:
        raise AssemblyError(f"Matriz não quadrada: {matrix.shape}")
    csc = sp.csc_matrix(matrix, dtype=float)
    start = time.perf_counter()
    if slab_size is not None and slab_size < csc.shape[0]:
        lu = SlabwiseLU(csc, slab_size, permc_spec)
        fill = lu.fill
        mode = f"fatias={lu.n_slabs}"
    else:
        lu = _factor_block(csc, permc_spec)
        fill = int(lu.L.nnz + lu.U.nnz)
        mode = "global"

    inertia = matrix_inertia(csc) if csc.shape[0] <= INERTIA_DENSE_LIMIT else None
    elapsed = time.perf_counter() - start
    logger.info(f"Fatoração ({mode}): n={csc.shape[0]}, nnz={csc.nnz}, fill={fill} ({elapsed:.2f}s)")
    return Factorization(
        lu=lu, matrix=csc, permutation=lu.perm_c.copy(), factor_time=elapsed, fill=fill, inertia=inertia
    )


def relative_residual(matrix: sp.spmatrix, x: np.ndarray, b: np.ndarray) -> float:
    norm_b = np.linalg.norm(b)
    if norm_b == 0.0:
        return float(np.linalg.norm(matrix @ x))
    return float(np.linalg.norm(matrix @ x - b) / norm_b)


def solve_with_residual(fact: Factorization, b: np.ndarray) -> Tuple[np.ndarray, float]:
    """Resolve M x = b com um passo de refinamento se o resíduo exceder o limiar"""
    b = np.asarray(b, dtype=float)
    if b.shape != (fact.size,):
        raise AssemblyError(f"Lado direito com shape {b.shape}, esperado ({fact.size},)")
    if not np.any(b):
        return np.zeros_like(b), 0.0

    x = fact.lu.solve(b)
    residual = relative_residual(fact.matrix, x, b)
    if residual > REFINEMENT_THRESHOLD:
        x = x + fact.lu.solve(b - fact.matrix @ x)
        refined = relative_residual(fact.matrix, x, b)
        logger.info(f"Refinamento iterativo: resíduo {residual:.3e} -> {refined:.3e}")
        residual = refined
    else:
        logger.debug(f"Resíduo relativo {residual:.3e}")
    return x, residual


def solve(fact: Factorization, b: np.ndarray) -> np.ndarray:
    x, _ = solve_with_residual(fact, b)
    return x
