"""
Definição do problema - velocidade de onda, soluções exatas, dados em omega e limiar GCC
Versão: 1.0
Data: 2026-10-13
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from domain.mesh_geometry import COORD_TOL, Mesh
from infrastructure.errors import ConfigurationError, MeshError

logger = logging.getLogger(__name__)

W1_DEFAULT = 3.0 * math.pi

Box = Sequence[Tuple[float, float]]


@dataclass(frozen=True)
class WaveSpeedModel:
    """
    Velocidade constante por subdomínio, estratificada na coordenada x

    Em 1D as interfaces são pontos; em 2D são as retas x = p.
    """

    interfaces: Tuple[float, ...]
    speeds: Tuple[float, ...]

    def __post_init__(self):
        if len(self.speeds) != len(self.interfaces) + 1:
            raise ConfigurationError(
                f"{len(self.interfaces)} interfaces exigem {len(self.interfaces) + 1} velocidades"
            )
        if any(c <= 0 for c in self.speeds):
            raise ConfigurationError(f"Velocidades devem ser positivas: {self.speeds}")
        if any(not 0.0 < p < 1.0 for p in self.interfaces):
            raise ConfigurationError(f"Interfaces devem estar em (0,1): {self.interfaces}")
        if list(self.interfaces) != sorted(self.interfaces):
            raise ConfigurationError("Interfaces devem estar ordenadas")

    @classmethod
    def homogeneous(cls, c: float = 1.0) -> "WaveSpeedModel":
        return cls(interfaces=(), speeds=(c,))

    def segments(self) -> List[Tuple[float, float, float]]:
        """Lista de (início, fim, c) cobrindo [0,1]"""
        bounds = [0.0, *self.interfaces, 1.0]
        return [(bounds[i], bounds[i + 1], self.speeds[i]) for i in range(len(self.speeds))]

    def speed_at(self, x: np.ndarray) -> np.ndarray:
        """c(x) avaliada na primeira coordenada"""
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(np.asarray(self.interfaces), x, side="right")
        return np.asarray(self.speeds)[idx]

    def csq_per_cell(self, mesh: Mesh) -> np.ndarray:
        """c^2 por célula; exige malha ajustada às interfaces"""
        lo = mesh.cell_origins[:, 0]
        hi = lo + mesh.cell_sizes[:, 0]
        for p in self.interfaces:
            if np.any((lo < p - COORD_TOL) & (hi > p + COORD_TOL)):
                raise MeshError(f"Malha não ajustada à interface x = {p}")
        return self.speed_at(mesh.cell_centers[:, 0]) ** 2

    def travel_time(self, x: np.ndarray) -> np.ndarray:
        """tau(x) = integral de 0 a x de 1/c; d_c(x,y) = |tau(x) - tau(y)|"""
        x = np.asarray(x, dtype=float)
        total = np.zeros_like(x)
        for lo, hi, c in self.segments():
            total += (np.clip(x, lo, hi) - lo) / c
        return total


class ExactSolution(ABC):
    """Solução de referência u(t, x) com x de shape (m, dim); depende apenas de x[:, 0]"""

    name: str = "exact"

    @abstractmethod
    def value(self, t, x: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def dt(self, t, x: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def dx(self, t, x: np.ndarray) -> np.ndarray:
        """Derivada na direção x (a única não nula)"""
        pass

    def __call__(self, t, x: np.ndarray) -> np.ndarray:
        return self.value(t, x)


def _first_coordinate(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[..., 0] if x.ndim >= 2 else x


@dataclass(frozen=True)
class StandingWaveBranch:
    """Ramo cos(w c t) cos(w (x - shift)) em [lo, hi]"""

    lo: float
    hi: float
    c: float
    w: float
    shift: float


class PiecewiseStandingWave(ExactSolution):
    """Onda estacionária por partes com frequências temporais iguais em todas as interfaces"""

    def __init__(self, branches: Sequence[StandingWaveBranch], name: str):
        self.branches = tuple(branches)
        self.name = name
        self._interfaces = np.array([b.lo for b in self.branches[1:]])

    def _select(self, x: np.ndarray):
        xs = _first_coordinate(x)
        idx = np.searchsorted(self._interfaces, xs, side="right")
        fields = np.array([[b.c, b.w, b.shift] for b in self.branches])[idx]
        return xs, fields[..., 0], fields[..., 1], fields[..., 2]

    def value(self, t, x):
        xs, c, w, s = self._select(x)
        return np.cos(w * c * t) * np.cos(w * (xs - s))

    def dt(self, t, x):
        xs, c, w, s = self._select(x)
        return -w * c * np.sin(w * c * t) * np.cos(w * (xs - s))

    def dx(self, t, x):
        xs, c, w, s = self._select(x)
        return -w * np.cos(w * c * t) * np.sin(w * (xs - s))

    def dtt(self, t, x):
        xs, c, w, s = self._select(x)
        return -((w * c) ** 2) * np.cos(w * c * t) * np.cos(w * (xs - s))

    def dxx(self, t, x):
        xs, c, w, s = self._select(x)
        return -(w**2) * np.cos(w * c * t) * np.cos(w * (xs - s))

    def branch_value(self, i: int, t, x) -> np.ndarray:
        """Avalia o ramo i fora do seu subdomínio (usado nas verificações de continuidade)"""
        b = self.branches[i]
        xs = _first_coordinate(x)
        return np.cos(b.w * b.c * t) * np.cos(b.w * (xs - b.shift))

    def branch_flux(self, i: int, t, x) -> np.ndarray:
        b = self.branches[i]
        xs = _first_coordinate(x)
        return -(b.c**2) * b.w * np.cos(b.w * b.c * t) * np.sin(b.w * (xs - b.shift))


class ZeroSolution(ExactSolution):
    name = "zero"

    def value(self, t, x):
        return np.zeros_like(_first_coordinate(x))

    dt = value
    dx = value


class PolynomialSolution(ExactSolution):
    """
    u = t * phi(x) com phi' = 1/c^2 por subdomínio

    Pertence ao espaço discreto para k, q >= 1 em malhas ajustadas, satisfaz
    a equação em cada subdomínio e as condições de interface.
    """

    name = "polynomial"

    def __init__(self, speed: WaveSpeedModel):
        self.speed = speed

    def _phi(self, xs):
        total = np.zeros_like(xs)
        for lo, hi, c in self.speed.segments():
            total += (np.clip(xs, lo, hi) - lo) / c**2
        return total

    def value(self, t, x):
        return t * self._phi(_first_coordinate(x))

    def dt(self, t, x):
        xs = _first_coordinate(x)
        return self._phi(xs) + 0.0 * t

    def dx(self, t, x):
        xs = _first_coordinate(x)
        return t / self.speed.speed_at(xs) ** 2


def exact_simple(c1: float, c2: float = 1.0, w1: float = W1_DEFAULT) -> PiecewiseStandingWave:
    """Solução com uma interface em x = 0.5; w2 = w1 c1 / c2"""
    w2 = w1 * c1 / c2
    return PiecewiseStandingWave(
        [StandingWaveBranch(0.0, 0.5, c1, w1, 0.5), StandingWaveBranch(0.5, 1.0, c2, w2, 0.5)],
        name="simple",
    )


def multijump_p2(p1: float, n: int, c1: float, c2: float = 1.0, w1: float = W1_DEFAULT) -> float:
    """p2 = (2 pi n + w2 p1) / w2, garantindo cos(w2 (p2 - p1)) = 1"""
    w2 = w1 * c1 / c2
    return (2.0 * math.pi * n + w2 * p1) / w2


def exact_multijump(p1: float, n: int, c1: float, c2: float = 1.0, w1: float = W1_DEFAULT) -> PiecewiseStandingWave:
    """Solução com duas interfaces p1 < p2, c3 = c1 e w3 = w1"""
    w2 = w1 * c1 / c2
    p2 = multijump_p2(p1, n, c1, c2, w1)
    if not p1 < p2 < 1.0:
        raise ConfigurationError(f"p2 = {p2:.6f} fora de (p1, 1) para p1={p1}, n={n}, c1={c1}")
    return PiecewiseStandingWave(
        [
            StandingWaveBranch(0.0, p1, c1, w1, p1),
            StandingWaveBranch(p1, p2, c2, w2, p1),
            StandingWaveBranch(p2, 1.0, c1, w1, p2),
        ],
        name="multijump",
    )


def exact_2d(x: float, y: float, t: float, c1: float) -> Tuple[float, float]:
    """Extensão independente de y da solução simples: retorna (u, du/dt)"""
    sol = exact_simple(c1)
    pt = np.array([[x, y]])
    return float(sol.value(t, pt)[0]), float(sol.dt(t, pt)[0])


@dataclass(frozen=True)
class DataDomain:
    """omega como união de caixas coordenadas"""

    boxes: Tuple[Tuple[Tuple[float, float], ...], ...]

    def __post_init__(self):
        if not self.boxes:
            raise ConfigurationError("Domínio de dados vazio")
        for box in self.boxes:
            if any(hi <= lo for lo, hi in box):
                raise ConfigurationError(f"Caixa degenerada: {box}")

    @classmethod
    def from_lists(cls, boxes) -> "DataDomain":
        return cls(tuple(tuple((float(lo), float(hi)) for lo, hi in box) for box in boxes))

    @property
    def dim(self) -> int:
        return len(self.boxes[0])

    def indicator(self, mesh: Mesh) -> np.ndarray:
        """Células inteiramente em omega (a malha precisa estar ajustada)"""
        return mesh.cells_in_boxes(self.boxes)

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        inside = np.zeros(points.shape[0], dtype=bool)
        for box in self.boxes:
            lo = np.array([b[0] for b in box])
            hi = np.array([b[1] for b in box])
            inside |= np.all((points >= lo - COORD_TOL) & (points <= hi + COORD_TOL), axis=1)
        return inside

    def breakpoints(self) -> List[float]:
        """Extremos interiores das caixas (1D), usados para ajustar a malha"""
        pts = {v for box in self.boxes for v in box[0] if 0.0 < v < 1.0}
        return sorted(pts)


class ObservedData:
    """u_omega: valores da solução exata restritos a omega_T, sem ruído"""

    def __init__(self, solution: ExactSolution, omega: DataDomain):
        self.solution = solution
        self.omega = omega

    def __call__(self, t, x: np.ndarray) -> np.ndarray:
        """Valores em omega; NaN marca pontos não amostrados"""
        x = np.atleast_2d(x)
        values = np.asarray(self.solution.value(t, x), dtype=float)
        return np.where(self.omega.contains(x), values, np.nan)


def sample_data(solution: ExactSolution, omega: DataDomain) -> ObservedData:
    return ObservedData(solution, omega)


@dataclass(frozen=True)
class GCCReport:
    """Resultado do cálculo do tempo mínimo T_min = 2 sup dist_c(x, omega)"""

    t_min: float
    farthest_point: float
    max_distance: float

    def satisfied_by(self, final_time: float) -> bool:
        return final_time > self.t_min


def gcc_threshold(speed: WaveSpeedModel, omega: DataDomain) -> GCCReport:
    """
    Tempo mínimo de observação na métrica adaptada a c (apenas 1D)

    Em coordenadas de tempo de percurso tau(x) a distância a omega é linear por
    partes; o máximo ocorre no ponto médio (em tau) de uma lacuna entre
    intervalos de omega ou numa extremidade de Omega não coberta.
    """
    if omega.dim != 1:
        raise ConfigurationError("Limiar GCC implementado apenas em 1D")
    intervals = sorted((box[0][0], box[0][1]) for box in omega.boxes)
    taus = [(float(speed.travel_time(lo)), float(speed.travel_time(hi))) for lo, hi in intervals]
    tau_end = float(speed.travel_time(1.0))

    # candidatos: (distância, tau do ponto)
    candidates = [(taus[0][0], 0.0), (tau_end - taus[-1][1], tau_end)]
    for (_, right), (left, _) in zip(taus[:-1], taus[1:]):
        if left > right:
            candidates.append((0.5 * (left - right), 0.5 * (left + right)))
    distance, tau_star = max(candidates)

    # inverte tau para obter o ponto físico mais distante
    x_star = 0.0
    for lo, hi, c in speed.segments():
        t_lo, t_hi = float(speed.travel_time(lo)), float(speed.travel_time(hi))
        if t_lo - 1e-15 <= tau_star <= t_hi + 1e-15:
            x_star = lo + (tau_star - t_lo) * c
            break
    logger.debug(f"GCC: dist_c max = {distance:.6f} em x = {x_star:.6f}")
    return GCCReport(t_min=2.0 * distance, farthest_point=x_star, max_distance=distance)
