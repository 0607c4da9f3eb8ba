"""Relative-position self-attention and the transformer blocks built on it."""

from __future__ import annotations

import math

import torch
import torch.nn as nn
import torch.nn.functional as F

NEG_INF = float("-inf")


class RelativeSelfAttention(nn.Module):
    """Multi-head self-attention with learned relative-position scores.

    One (2·max_len−1, head_dim) embedding table per attention module, shared
    across heads; the per-pair score is the query dotted with the embedding
    of the clipped key-minus-query offset, gathered into the logit matrix.
    """

    def __init__(self, d_model: int, heads: int, max_len: int, dropout: float):
        super().__init__()
        assert d_model % heads == 0
        self.heads = heads
        self.head_dim = d_model // heads
        self.max_len = max_len
        self.qkv = nn.Linear(d_model, 3 * d_model)
        self.out = nn.Linear(d_model, d_model)
        self.drop = nn.Dropout(dropout)
        self.rel_table = nn.Parameter(torch.empty(2 * max_len - 1, self.head_dim))
        nn.init.normal_(self.rel_table, std=self.head_dim**-0.5)

    def _rel_index(self, L: int, device) -> torch.Tensor:
        pos = torch.arange(L, device=device)
        # offset = key - query, clipped into the table, shifted non-negative
        off = pos.unsqueeze(0) - pos.unsqueeze(1)
        return off.clamp(-(self.max_len - 1), self.max_len - 1) + self.max_len - 1

    def forward(self, x: torch.Tensor, allow: torch.Tensor | None = None) -> torch.Tensor:
        B, L, _ = x.shape
        q, k, v = self.qkv(x).chunk(3, dim=-1)
        q = q.view(B, L, self.heads, self.head_dim).transpose(1, 2)
        k = k.view(B, L, self.heads, self.head_dim).transpose(1, 2)
        v = v.view(B, L, self.heads, self.head_dim).transpose(1, 2)

        scores = q @ k.transpose(-2, -1)
        rel = torch.einsum("bhqd,rd->bhqr", q, self.rel_table)
        idx = self._rel_index(L, x.device).expand(B, self.heads, L, L)
        scores = (scores + rel.gather(-1, idx)) / math.sqrt(self.head_dim)

        if allow is not None:
            if allow.dim() == 2:
                allow = allow.unsqueeze(0)
            scores = scores.masked_fill(~allow.unsqueeze(1), NEG_INF)
        attn = self.drop(F.softmax(scores, dim=-1))
        ctx = (attn @ v).transpose(1, 2).reshape(B, L, -1)
        return self.out(ctx)


class FeedForward(nn.Module):
    def __init__(self, d_model: int, dropout: float):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(d_model, 2 * d_model),
            nn.ReLU(),
            nn.Dropout(dropout),
            nn.Linear(2 * d_model, d_model),
        )

    def forward(self, x):
        return self.net(x)


class EncoderBlock(nn.Module):
    """Post-norm: self-attention then feed-forward, residual around each."""

    def __init__(self, d_model: int, heads: int, max_len: int, dropout: float):
        super().__init__()
        self.attn = RelativeSelfAttention(d_model, heads, max_len, dropout)
        self.ff = FeedForward(d_model, dropout)
        self.norm1 = nn.LayerNorm(d_model)
        self.norm2 = nn.LayerNorm(d_model)
        self.drop = nn.Dropout(dropout)

    def forward(self, x: torch.Tensor, allow: torch.Tensor | None = None) -> torch.Tensor:
        x = self.norm1(x + self.drop(self.attn(x, allow)))
        return self.norm2(x + self.drop(self.ff(x)))


class DecoderBlock(nn.Module):
    """Masked self-attention, cross-attention over the latent memory, then
    feed-forward; post-norm throughout."""

    def __init__(self, d_model: int, heads: int, max_len: int, d_mem: int, dropout: float):
        super().__init__()
        self.attn = RelativeSelfAttention(d_model, heads, max_len, dropout)
        self.cross = nn.MultiheadAttention(
            d_model, heads, dropout=dropout, kdim=d_mem, vdim=d_mem, batch_first=True
        )
        self.ff = FeedForward(d_model, dropout)
        self.norm1 = nn.LayerNorm(d_model)
        self.norm2 = nn.LayerNorm(d_model)
        self.norm3 = nn.LayerNorm(d_model)
        self.drop = nn.Dropout(dropout)

    def forward(self, x: torch.Tensor, memory: torch.Tensor, allow: torch.Tensor) -> torch.Tensor:
        x = self.norm1(x + self.drop(self.attn(x, allow)))
        ctx, _ = self.cross(x, memory, memory, need_weights=False)
        x = self.norm2(x + self.drop(ctx))
        return self.norm3(x + self.drop(self.ff(x)))
