"""Decoder self-attention masking over the K+1 input positions."""

from __future__ import annotations

from dataclasses import dataclass

import torch

from ..corpus.spans import TargetSpan


@dataclass(frozen=True)
class AttentionMask:
    """Boolean allow-matrix over decoder input positions.

    Position 0 holds the start symbol; position k holds token k-1. Entry
    [i, j] is True when row i may attend to column j.
    """

    allow: torch.Tensor

    def __post_init__(self):
        assert self.allow.dtype == torch.bool and self.allow.dim() == 2
        assert bool(self.allow.any(dim=-1).all()), "every row must attend somewhere"


def build_decoder_mask(span: TargetSpan, K: int) -> AttentionMask:
    """The two-rule mask: non-target rows attend only to non-target columns;
    target rows additionally attend to target columns at or before their own
    position."""
    span.check_within(K)
    n = K + 1
    is_target = torch.zeros(n, dtype=torch.bool)
    is_target[span.start + 1 : span.stop + 1] = True

    allow = (~is_target).unsqueeze(0).repeat(n, 1)
    pos = torch.arange(n)
    at_or_before = pos.unsqueeze(0) <= pos.unsqueeze(1)
    allow[is_target] |= (at_or_before & is_target.unsqueeze(0))[is_target]
    return AttentionMask(allow=allow)


def batch_decoder_masks(spans: list[TargetSpan], K: int) -> torch.Tensor:
    """Stacked allow-matrices, shape (B, K+1, K+1)."""
    return torch.stack([build_decoder_mask(s, K).allow for s in spans])
