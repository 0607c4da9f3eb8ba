"""Shared sequence-to-Gaussian topology used by the encoder and the prior."""

from __future__ import annotations

import torch
import torch.nn as nn
from torch.nn.utils.rnn import pack_padded_sequence

from ..alphabet import ALPHABET
from ..corpus.spans import TargetSpan
from .attention import DecoderBlock, EncoderBlock
from .config import ModelConfig
from .gaussian import GaussianParams


class SequenceEncoder(nn.Module):
    """Token + learned absolute positional embeddings, a linear lift to the
    model width, then the relative-attention stack."""

    def __init__(self, cfg: ModelConfig, n_positions: int):
        super().__init__()
        self.tok = nn.Embedding(ALPHABET.model_size, cfg.token_embed)
        self.pos = nn.Embedding(n_positions, cfg.token_embed)
        self.proj = nn.Linear(cfg.token_embed, cfg.hidden)
        self.drop = nn.Dropout(cfg.dropout)
        self.blocks = nn.ModuleList(
            EncoderBlock(cfg.hidden, cfg.heads, n_positions, cfg.dropout)
            for _ in range(cfg.n_transformer_layers)
        )

    def forward(self, ids: torch.Tensor, allow: torch.Tensor | None = None) -> torch.Tensor:
        L = ids.shape[1]
        positions = torch.arange(L, device=ids.device)
        x = self.proj(self.drop(self.tok(ids) + self.pos(positions)))
        for block in self.blocks:
            x = block(x, allow)
        return x


class SpanPooler(nn.Module):
    """Bi-LSTM over the target-position vectors only; the two terminal
    states h_l ⊕ h_r summarize the span."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.lstm = nn.LSTM(
            cfg.hidden,
            cfg.hidden,
            num_layers=cfg.n_lstm_layers,
            bidirectional=True,
            batch_first=True,
        )

    def forward(self, h: torch.Tensor, spans: list[TargetSpan]) -> torch.Tensor:
        B, _, H = h.shape
        lengths = torch.tensor([s.length for s in spans])
        padded = h.new_zeros(B, int(lengths.max()), H)
        for i, s in enumerate(spans):
            padded[i, : s.length] = h[i, s.start : s.stop]
        packed = pack_padded_sequence(padded, lengths, batch_first=True, enforce_sorted=False)
        _, (h_n, _) = self.lstm(packed)
        return torch.cat([h_n[-2], h_n[-1]], dim=-1)


class GaussianHead(nn.Module):
    """Two parallel 2-layer MLPs producing mean and log_v."""

    def __init__(self, d_in: int, d_hidden: int, d_out: int):
        super().__init__()
        self.mean = nn.Sequential(nn.Linear(d_in, d_hidden), nn.SELU(), nn.Linear(d_hidden, d_out))
        self.log_v = nn.Sequential(
            nn.Linear(d_in, d_hidden), nn.SELU(), nn.Linear(d_hidden, d_out)
        )

    def forward(self, h: torch.Tensor) -> GaussianParams:
        return GaussianParams(mean=self.mean(h), log_v=self.log_v(h))


class ContextGaussianNet(nn.Module):
    """Full sequence → span Gaussian pipeline (one instance each for the
    encoder and the prior; weights are never shared between them)."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.seq = SequenceEncoder(cfg, n_positions=cfg.K)
        self.pool = SpanPooler(cfg)
        self.head = GaussianHead(2 * cfg.hidden, cfg.mlp_hidden, cfg.d_z)

    def forward(self, ids: torch.Tensor, spans: list[TargetSpan]) -> GaussianParams:
        return self.head(self.pool(self.seq(ids), spans))


class Decoder(nn.Module):
    """Masked transformer over s ⊕ x with per-layer cross-attention to the
    latent memory; emits data-vocabulary logits at every input position."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        n_pos = cfg.K + 1
        self.tok = nn.Embedding(ALPHABET.model_size, cfg.token_embed)
        self.pos = nn.Embedding(n_pos, cfg.token_embed)
        self.proj = nn.Linear(cfg.token_embed, cfg.hidden)
        self.drop = nn.Dropout(cfg.dropout)
        self.memory = nn.Linear(cfg.d_z, cfg.d_z * cfg.l_z)
        self.l_z = cfg.l_z
        self.d_z = cfg.d_z
        self.blocks = nn.ModuleList(
            DecoderBlock(cfg.hidden, cfg.heads, n_pos, cfg.d_z, cfg.dropout)
            for _ in range(cfg.n_transformer_layers)
        )
        self.out = nn.Linear(cfg.hidden, ALPHABET.data_size)

    def forward(self, ids: torch.Tensor, z: torch.Tensor, allow: torch.Tensor) -> torch.Tensor:
        B, L = ids.shape
        positions = torch.arange(L, device=ids.device)
        x = self.proj(self.drop(self.tok(ids) + self.pos(positions)))
        mem = self.memory(z).view(B, self.l_z, self.d_z)
        for block in self.blocks:
            x = block(x, mem, allow)
        return self.out(x)
