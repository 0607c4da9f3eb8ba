"""The contextual latent space model: encoder, flow prior, and decoder."""

from __future__ import annotations

import torch
import torch.nn as nn

from ..alphabet import ALPHABET
from ..corpus.spans import TargetSpan
from ..errors import InvalidInput
from .config import ModelConfig
from .flow import FlowStack
from .gaussian import GaussianParams
from .masks import batch_decoder_masks
from .networks import ContextGaussianNet, Decoder


class CLSM(nn.Module):
    """Infilling model over 128-step token windows.

    All public methods are batch-first: ``ids`` is a long tensor (B, K) of
    alphabet indices and ``spans`` a list of B target spans. The latent z
    lives in Z; the flow maps it to W where the conditional base Gaussian
    is defined.
    """

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.cfg = cfg
        self.encoder = ContextGaussianNet(cfg)
        self.prior_net = ContextGaussianNet(cfg)
        self.flow = FlowStack(
            cfg.d_z, cfg.n_coupling_layers, cfg.coupling_mlp_hidden, cfg.leaky_slope
        )
        self.decoder = Decoder(cfg)

    @property
    def latent_dim(self) -> int:
        return self.cfg.d_z

    def loss(self, ids, spans, beta, noise=None):
        from ..training.loss import compute_loss

        return compute_loss(self, ids, spans, beta, noise)

    # ----------------------------------------------------------------- #
    # posterior                                                         #
    # ----------------------------------------------------------------- #

    def encode_posterior(self, ids: torch.Tensor, spans: list[TargetSpan]) -> GaussianParams:
        """q(z|x, τ) from the full window including target content."""
        self._check(ids, spans)
        return self.encoder(ids, spans)

    # ----------------------------------------------------------------- #
    # prior                                                             #
    # ----------------------------------------------------------------- #

    def prior_input(self, ids: torch.Tensor, spans: list[TargetSpan]) -> torch.Tensor:
        """The window with every target position replaced by the constraint
        symbol, so the prior never sees target content."""
        out = ids.clone()
        for i, s in enumerate(spans):
            out[i, s.start : s.stop] = ALPHABET.constraint_id
        return out

    def prior_base_params(self, ids: torch.Tensor, spans: list[TargetSpan]) -> GaussianParams:
        """Base Gaussian of p(z|x_C, τ) over W; target content is masked out
        before the network ever sees it."""
        self._check(ids, spans)
        return self.prior_net(self.prior_input(ids, spans), spans)

    def prior_log_density(self, z: torch.Tensor, base: GaussianParams) -> torch.Tensor:
        """log p(z|x_C, τ) = log N(f(z); base) + log|det ∂f/∂z|."""
        w, log_det = self.flow(z)
        return base.log_prob(w) + log_det

    # ----------------------------------------------------------------- #
    # decoder                                                           #
    # ----------------------------------------------------------------- #

    def decode_logits(
        self, ids: torch.Tensor, spans: list[TargetSpan], z: torch.Tensor
    ) -> torch.Tensor:
        """Teacher-forced logits for the target tokens.

        Returns (B, L_max, 32) where row i holds spans[i].length valid
        positions; the prediction for target token t is read from decoder
        input position t, which holds the preceding token (or the start
        symbol when t = 0).
        """
        self._check(ids, spans)
        if z.shape != (ids.shape[0], self.cfg.d_z):
            raise InvalidInput(f"z shape {tuple(z.shape)} does not match batch/d_z")
        B = ids.shape[0]
        start_col = ids.new_full((B, 1), ALPHABET.start_id)
        inp = torch.cat([start_col, ids], dim=1)
        allow = batch_decoder_masks(spans, self.cfg.K).to(ids.device)
        h = self.decoder(inp, z, allow)

        L_max = max(s.length for s in spans)
        logits = h.new_zeros(B, L_max, h.shape[-1])
        for i, s in enumerate(spans):
            logits[i, : s.length] = h[i, s.start : s.stop]
        return logits

    # ----------------------------------------------------------------- #

    def _check(self, ids: torch.Tensor, spans: list[TargetSpan]) -> None:
        if ids.dim() != 2 or ids.shape[1] != self.cfg.K:
            raise InvalidInput(f"expected (B, {self.cfg.K}) ids, got {tuple(ids.shape)}")
        if len(spans) != ids.shape[0]:
            raise InvalidInput("one span per batch row required")
        for s in spans:
            s.check_within(self.cfg.K)


def target_mask(spans: list[TargetSpan], L_max: int, device=None) -> torch.Tensor:
    """(B, L_max) validity mask for padded per-span tensors."""
    m = torch.zeros(len(spans), L_max, dtype=torch.bool, device=device)
    for i, s in enumerate(spans):
        m[i, : s.length] = True
    return m
