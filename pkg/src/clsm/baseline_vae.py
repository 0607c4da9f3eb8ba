"""Sequence VAE baseline: Bi-LSTM encoder, LSTM decoder, N(0, I) prior."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F

from .alphabet import ALPHABET
from .corpus.spans import TargetSpan
from .errors import InvalidConfig, InvalidInput, NumericalError
from .model.gaussian import GaussianParams, kl_to_standard_normal
from .training.loss import LossBreakdown

GAMMA_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 2.0)


@dataclass(frozen=True)
class VAEConfig:
    d_z: int = 128
    token_embed: int = 128
    hidden: int = 256
    n_lstm_layers: int = 2
    dropout: float = 0.1
    gamma: float = 0.4
    K: int = 128

    def __post_init__(self):
        if min(self.d_z, self.token_embed, self.hidden, self.n_lstm_layers, self.K) <= 0:
            raise InvalidConfig("all dimensions must be positive")
        if self.gamma < 0:
            raise InvalidConfig(f"gamma must be >= 0, got {self.gamma}")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, payload: dict) -> "VAEConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(payload) - known
        if unknown:
            raise InvalidConfig(f"unknown vae config keys: {sorted(unknown)}")
        return cls(**payload)


class SequenceVAE(nn.Module):
    """Whole-window autoencoder with a standard-normal prior.

    z conditions the decoder twice: mapped to the LSTM's initial (h, c) and
    concatenated to every input embedding.
    """

    def __init__(self, cfg: VAEConfig):
        super().__init__()
        self.cfg = cfg
        self.tok = nn.Embedding(ALPHABET.model_size, cfg.token_embed)
        self.encoder = nn.LSTM(
            cfg.token_embed,
            cfg.hidden,
            num_layers=cfg.n_lstm_layers,
            bidirectional=True,
            batch_first=True,
            dropout=cfg.dropout if cfg.n_lstm_layers > 1 else 0.0,
        )
        self.mean_head = nn.Linear(2 * cfg.hidden, cfg.d_z)
        self.log_v_head = nn.Linear(2 * cfg.hidden, cfg.d_z)
        self.decoder = nn.LSTM(
            cfg.token_embed + cfg.d_z,
            cfg.hidden,
            num_layers=cfg.n_lstm_layers,
            batch_first=True,
            dropout=cfg.dropout if cfg.n_lstm_layers > 1 else 0.0,
        )
        self.init_state = nn.Linear(cfg.d_z, 2 * cfg.n_lstm_layers * cfg.hidden)
        self.out = nn.Linear(cfg.hidden, ALPHABET.data_size)

    @property
    def latent_dim(self) -> int:
        return self.cfg.d_z

    def encode(self, ids: torch.Tensor) -> GaussianParams:
        _, (h_n, _) = self.encoder(self.tok(ids))
        h = torch.cat([h_n[-2], h_n[-1]], dim=-1)
        return GaussianParams(mean=self.mean_head(h), log_v=self.log_v_head(h))

    def _decoder_state(self, z: torch.Tensor):
        B = z.shape[0]
        hc = self.init_state(z).view(B, 2, self.cfg.n_lstm_layers, self.cfg.hidden)
        h0 = hc[:, 0].transpose(0, 1).contiguous()
        c0 = hc[:, 1].transpose(0, 1).contiguous()
        return h0, c0

    def decode_logits(self, ids: torch.Tensor, z: torch.Tensor) -> torch.Tensor:
        """Teacher-forced logits over the whole window: position t predicts
        token t from s ⊕ x_{<t} and z."""
        B, K = ids.shape
        start = ids.new_full((B, 1), ALPHABET.start_id)
        inp = torch.cat([start, ids[:, :-1]], dim=1)
        emb = torch.cat([self.tok(inp), z.unsqueeze(1).expand(B, K, -1)], dim=-1)
        h, _ = self.decoder(emb, self._decoder_state(z))
        return self.out(h)

    def loss(self, ids, spans, beta, noise=None) -> LossBreakdown:
        """Same signature as the infilling model so the shared fit loop can
        drive it; spans are ignored, beta is the annealed gamma."""
        return vae_loss(self, ids, beta, noise)


def vae_loss(
    model: SequenceVAE, ids: torch.Tensor, gamma: float, noise: torch.Tensor | None = None
) -> LossBreakdown:
    """rec is the per-token mean log-likelihood over the full window with a
    single posterior sample; kl is the closed-form Gaussian KL to N(0, I)."""
    if ids.dim() != 2 or ids.shape[1] != model.cfg.K:
        raise InvalidInput(f"expected (B, {model.cfg.K}) ids, got {tuple(ids.shape)}")
    q = model.encode(ids)
    z = q.sample(noise)
    logp = F.log_softmax(model.decode_logits(ids, z), dim=-1)
    rec = logp.gather(-1, ids.unsqueeze(-1)).squeeze(-1).mean(dim=-1).mean()
    kl = kl_to_standard_normal(q).mean()
    total = -(rec - gamma * kl)
    if not torch.isfinite(total):
        raise NumericalError("non-finite loss")
    return LossBreakdown(rec=rec, kl=kl, total=total, beta=gamma)


def vae_greedy_decode(model: SequenceVAE, z: torch.Tensor, left: list[str], length: int) -> list[str]:
    """Teacher-force the left context, then greedily extend ``length`` tokens.

    The right context never enters; this is the baseline's structural
    limitation and is preserved on purpose.
    """
    model.eval()
    with torch.no_grad():
        ids = [ALPHABET.start_id] + ALPHABET.encode_seq(list(left))
        inp = torch.tensor([ids])
        emb = torch.cat([model.tok(inp), z.unsqueeze(1).expand(1, inp.shape[1], -1)], dim=-1)
        state = model._decoder_state(z)
        if inp.shape[1] > 1:
            _, state = model.decoder(emb[:, :-1], state)
        prev = inp[:, -1:]
        out = []
        for _ in range(length):
            emb_t = torch.cat([model.tok(prev), z.unsqueeze(1)], dim=-1)
            h, state = model.decoder(emb_t, state)
            tok = int(model.out(h[:, -1]).argmax())
            out.append(tok)
            prev = torch.tensor([[tok]])
    return ALPHABET.decode_seq(out)


def vae_interpolate(
    model: SequenceVAE,
    z1: torch.Tensor,
    z2: torch.Tensor,
    J: int,
    left: list[str],
    right: list[str],
    span: TargetSpan,
) -> list[list[str]]:
    """Straight line in Z; each point decoded from the left context only and
    reassembled with the (unconditioned) right context."""
    if J < 1:
        raise InvalidInput(f"J must be >= 1, got {J}")
    if len(left) != span.start:
        raise InvalidInput("left context must end where the span starts")
    out = []
    for j in range(J + 1):
        alpha = j / J
        zj = z1 if j == 0 else z2 if j == J else (1 - alpha) * z1 + alpha * z2
        target = vae_greedy_decode(model, zj, left, span.length)
        out.append([*left, *target, *right])
    return out
