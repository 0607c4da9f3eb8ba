"""Optimization hyperparameters and the YAML config file schema."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

import yaml

from ..errors import InvalidConfig
from ..model.config import ModelConfig

BETA_GRID = (0.004, 0.006, 0.008, 0.010, 0.012, 0.014, 0.016)


@dataclass(frozen=True)
class TrainConfig:
    batch: int = 64
    epochs: int = 2
    lr: float = 0.0005
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    beta_max: float = 0.012
    anneal_epochs: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.batch < 1 or self.epochs < 1 or self.anneal_epochs < 1:
            raise InvalidConfig("batch, epochs, anneal_epochs must be >= 1")
        if self.lr < 0:
            raise InvalidConfig(f"lr must be >= 0, got {self.lr}")
        if self.beta_max < 0:
            raise InvalidConfig(f"beta_max must be >= 0, got {self.beta_max}")
        for b in (self.adam_beta1, self.adam_beta2):
            if not 0.0 <= b < 1.0:
                raise InvalidConfig(f"adam betas must be in [0, 1), got {b}")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, payload: dict) -> "TrainConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(payload) - known
        if unknown:
            raise InvalidConfig(f"unknown train config keys: {sorted(unknown)}")
        return cls(**payload)


def load_config_file(path: str | Path, model_cls=ModelConfig, section: str = "model"):
    """Parse a YAML file with optional ``model:`` (or ``section:``) and
    ``train:`` sections; unknown keys anywhere are an error.

    Returns ``(model_cls instance, TrainConfig)``. Other model families pass
    their own config class and section name (``vae`` and ``lm`` training
    reuse this schema).
    """
    try:
        payload = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise InvalidConfig(f"{path}: not valid YAML: {e}") from e
    if payload is None:
        payload = {}
    if not isinstance(payload, dict):
        raise InvalidConfig(f"{path}: top level must be a mapping")
    unknown = set(payload) - {section, "train"}
    if unknown:
        raise InvalidConfig(f"{path}: unknown sections {sorted(unknown)}")
    try:
        model_cfg = model_cls.from_dict(payload.get(section) or {})
        train_cfg = TrainConfig.from_dict(payload.get("train") or {})
    except TypeError as e:
        raise InvalidConfig(f"{path}: {e}") from e
    return model_cfg, train_cfg
