"""
Carregador de configuração YAML (seção global + presets de experimentos)
Versão: 1.0
Data: 2026-10-15
"""

import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from dto.run_config import RunConfig
from infrastructure.errors import ConfigurationError

DEFAULT_CONFIG_PATH = Path("config/experiments.yaml")

# Chaves de preset que não pertencem ao RunConfig
PRESET_METADATA = ("description", "enabled")


@dataclass
class GlobalSettings:
    """Seção 'global' do arquivo de configuração"""

    output_directory: str = "results"
    log_level: str = "INFO"
    parallel_runs: bool = True
    max_workers: int = 4
    dump_matrix: bool = False


class ConfigLoader:
    """Lê o arquivo YAML e resolve presets em RunConfig"""

    def __init__(self, path: Optional[Path] = None):
        self.path = Path(path) if path is not None else DEFAULT_CONFIG_PATH
        self.logger = logging.getLogger(__name__)
        self._raw: Optional[Dict[str, Any]] = None

    def load(self) -> Dict[str, Any]:
        """Carrega (uma vez) o conteúdo bruto do YAML; arquivo ausente equivale a vazio"""
        if self._raw is None:
            if not self.path.exists():
                self.logger.warning(f"Arquivo de configuração não encontrado: {self.path}")
                self._raw = {}
            else:
                try:
                    with open(self.path, "r", encoding="utf-8") as f:
                        self._raw = yaml.safe_load(f) or {}
                except yaml.YAMLError as e:
                    raise ConfigurationError(f"YAML inválido em {self.path}: {e}") from e
        return self._raw

    def global_settings(self) -> GlobalSettings:
        section = self.load().get("global") or {}
        known = set(GlobalSettings.__dataclass_fields__)
        unknown = set(section) - known
        if unknown:
            raise ConfigurationError(f"Chaves desconhecidas em 'global': {sorted(unknown)}")
        return GlobalSettings(**section)

    def presets(self, include_disabled: bool = False) -> List[Dict[str, Any]]:
        """Lista de presets (dicionários brutos), apenas os habilitados por padrão"""
        entries = self.load().get("experiments") or []
        return [e for e in entries if include_disabled or e.get("enabled", True)]

    def preset(self, name: str) -> RunConfig:
        """
        Resolve um preset pelo nome

        Raises:
            ConfigurationError: preset inexistente ou com chaves inválidas
        """
        for entry in self.presets(include_disabled=True):
            if entry.get("name") == name:
                data = {k: v for k, v in entry.items() if k not in PRESET_METADATA}
                return RunConfig.from_dict(data)
        available = ", ".join(e.get("name", "?") for e in self.presets(include_disabled=True))
        raise ConfigurationError(f"Preset '{name}' não encontrado (disponíveis: {available})")

    def resolve(self, name: Optional[str] = None, **overrides) -> RunConfig:
        """Preset (ou padrões) + sobrescritas da CLI, validado"""
        base = self.preset(name) if name else RunConfig()
        return base.with_overrides(**overrides).validate()


def write_resolved_config(config: RunConfig, path: Path) -> Path:
    """Grava a configuração resolvida ao lado das saídas"""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(asdict(config), f, sort_keys=False, allow_unicode=True)
    return path
