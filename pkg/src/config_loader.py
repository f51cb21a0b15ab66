"""
Configuration loader - reads and validates config.yaml.
"""

import logging
import os
from dataclasses import asdict, dataclass, field
from typing import Optional

import yaml

logger = logging.getLogger(__name__)


@dataclass
class PrecisionConfig:
    bits: int = 128
    guard_bits: int = 64


@dataclass
class ToleranceConfig:
    integrality: float = 1e-9
    subspace: float = 1e-9
    membership: float = 1e-9
    relation: float = 1e-8
    isolation_radius: float = 1e-6
    height_convergence: float = 1e-12


@dataclass
class BoundsConfig:
    max_order: int = 200
    enumeration_rank: int = 10
    modular_level: int = 10
    enumeration_degree: int = 3
    enumeration_height: int = 10000
    j_max_terms: int = 2000
    annihilator_box: int = 2


@dataclass
class LLLConfig:
    delta: float = 0.99


@dataclass
class RunSection:
    seed: int = 0
    output: Optional[str] = None
    format: str = "json"
    cache_dir: Optional[str] = "cache"


@dataclass
class RunConfig:
    precision: PrecisionConfig = field(default_factory=PrecisionConfig)
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    bounds: BoundsConfig = field(default_factory=BoundsConfig)
    lll: LLLConfig = field(default_factory=LLLConfig)
    run: RunSection = field(default_factory=RunSection)

    @property
    def precision_bits(self) -> int:
        return self.precision.bits

    @property
    def digits(self) -> int:
        # decimal digits carried by precision_bits
        return max(15, int(self.precision.bits * 0.30103))

    def validate(self) -> "RunConfig":
        if self.precision.bits < 53:
            raise ValueError(f"precision.bits must be at least 53, got {self.precision.bits}")
        if self.precision.guard_bits < 0:
            raise ValueError(f"precision.guard_bits must be >= 0, got {self.precision.guard_bits}")
        for name, value in asdict(self.tolerances).items():
            if not value > 0:
                raise ValueError(f"tolerances.{name} must be positive, got {value}")
        for name, value in asdict(self.bounds).items():
            if not (isinstance(value, int) and value > 0):
                raise ValueError(f"bounds.{name} must be a positive integer, got {value!r}")
        if not 0.25 < self.lll.delta < 1:
            raise ValueError(f"lll.delta must lie in (0.25, 1), got {self.lll.delta}")
        if self.run.format not in ("json", "csv"):
            raise ValueError(f"run.format must be 'json' or 'csv', got {self.run.format!r}")
        return self

    def to_dict(self) -> dict:
        return asdict(self)


_SECTIONS = {
    "precision": PrecisionConfig,
    "tolerances": ToleranceConfig,
    "bounds": BoundsConfig,
    "lll": LLLConfig,
    "run": RunSection,
}


def _section(cls, data: dict, name: str):
    defaults = asdict(cls())
    unknown = set(data) - set(defaults)
    if unknown:
        logger.warning(f"Ignoring unknown keys in '{name}': {sorted(unknown)}")
    values = {}
    for key, default in defaults.items():
        value = data.get(key, default)
        # YAML reads 1e-9 without a dot as a string
        if isinstance(default, float) and isinstance(value, (str, int)):
            value = float(value)
        values[key] = value
    return cls(**values)


def config_from_dict(data: Optional[dict]) -> RunConfig:
    config = RunConfig()
    if not data:
        return config
    for name, cls in _SECTIONS.items():
        if name in data:
            setattr(config, name, _section(cls, data[name] or {}, name))
    return config.validate()


def load_config(config_path: Optional[str] = None) -> RunConfig:
    """
    Load configuration from YAML file.
    Falls back to defaults if file not found.
    """
    if config_path is None:
        project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
        config_path = os.path.join(project_root, "config.yaml")

    if not os.path.exists(config_path):
        logger.warning(f"Config file not found at {config_path}, using defaults")
        return RunConfig()

    try:
        with open(config_path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
        config = config_from_dict(data)
        logger.info(f"Configuration loaded from {config_path}")
        return config

    except (OSError, yaml.YAMLError, TypeError, ValueError) as e:
        logger.error(f"Failed to load config from {config_path}: {e}")
        logger.info("Using default configuration")
        return RunConfig()
