"""
Fixtures compartilhadas - src/ no sys.path (mesma convenção do script de entrada)
"""

import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from domain.fe_space import SpaceTimeSpace, SpatialSpace  # noqa: E402
from domain.mesh_geometry import build_mesh_1d, build_mesh_2d, build_time_partition  # noqa: E402
from dto.run_config import RunConfig  # noqa: E402
from experiment_factory import ExperimentFactory  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


@pytest.fixture
def mesh_1d():
    """Quatro células de tamanho 0.25"""
    return build_mesh_1d(1)


@pytest.fixture
def mesh_2d():
    return build_mesh_2d(1)


@pytest.fixture
def space_1d(mesh_1d):
    """k = 2, q = 1, duas fatias em [0, 0.5]"""
    return SpaceTimeSpace(SpatialSpace(mesh_1d, 2), build_time_partition(0.5, 2), 1)


@pytest.fixture
def tiny_config():
    """Solução simples em 1D: 4 células, k = q = 1, duas fatias, pesos de estabilização unitários"""
    return RunConfig(
        name="tiny", c1=2.0, level=1, k=1, q=1, final_time=0.5, gamma_data=1.0, gamma_primal=1.0, boundary_penalty=1.0
    ).validate()


@pytest.fixture
def tiny_setup(tiny_config):
    return ExperimentFactory().build_problem(tiny_config)


@pytest.fixture
def config_file(tmp_path):
    """Arquivo YAML mínimo com seção global e dois presets"""
    path = tmp_path / "experiments.yaml"
    path.write_text(
        f"""
global:
  output_directory: "{(tmp_path / 'results').as_posix()}"
  log_level: "WARNING"
  parallel_runs: false
  max_workers: 1
  dump_matrix: false

experiments:
  - name: "poly"
    description: "solução polinomial"
    solution: "polynomial"
    c1: 2.0
    final_time: 0.5
    level: 1
    k: 1
    q: 1
    enabled: true
  - name: "disabled_case"
    solution: "simple"
    level: 1
    enabled: false
""",
        encoding="utf-8",
    )
    return path
