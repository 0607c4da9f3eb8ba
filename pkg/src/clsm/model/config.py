"""Model hyperparameter container."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from ..errors import InvalidConfig


@dataclass(frozen=True)
class ModelConfig:
    d_z: int = 128
    l_z: int = 4
    token_embed: int = 128
    hidden: int = 256
    heads: int = 8
    dropout: float = 0.1
    mlp_hidden: int = 512
    n_transformer_layers: int = 2
    n_lstm_layers: int = 2
    n_coupling_layers: int = 4
    coupling_mlp_hidden: int = 256
    leaky_slope: float = 0.01
    K: int = 128

    def __post_init__(self):
        dims = (
            self.d_z,
            self.l_z,
            self.token_embed,
            self.hidden,
            self.heads,
            self.mlp_hidden,
            self.n_transformer_layers,
            self.n_lstm_layers,
            self.n_coupling_layers,
            self.coupling_mlp_hidden,
            self.K,
        )
        if any(d <= 0 for d in dims):
            raise InvalidConfig("all model dimensions must be positive")
        if self.d_z % 2:
            raise InvalidConfig(f"d_z must be even for coupling splits, got {self.d_z}")
        if self.hidden % self.heads:
            raise InvalidConfig(f"hidden {self.hidden} not divisible by heads {self.heads}")
        if not 0.0 <= self.dropout < 1.0:
            raise InvalidConfig(f"dropout must be in [0, 1), got {self.dropout}")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, payload: dict) -> "ModelConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(payload) - known
        if unknown:
            raise InvalidConfig(f"unknown model config keys: {sorted(unknown)}")
        return cls(**payload)
