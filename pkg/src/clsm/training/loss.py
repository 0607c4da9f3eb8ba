"""Training objective: per-token reconstruction minus β-weighted KL."""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn.functional as F

from ..corpus.spans import TargetSpan
from ..errors import InvalidConfig, NumericalError
from ..model.clsm import CLSM, target_mask


@dataclass
class LossBreakdown:
    """Scalar tensors; ``total`` is the quantity actually minimized,
    -(rec - beta * kl)."""

    rec: torch.Tensor
    kl: torch.Tensor
    total: torch.Tensor
    beta: float

    def floats(self) -> dict:
        return {
            "rec": float(self.rec.detach()),
            "kl": float(self.kl.detach()),
            "total": float(self.total.detach()),
            "beta": self.beta,
        }


def beta_schedule(step: int, total_anneal_steps: int, beta_max: float) -> float:
    """Linear ramp from 0 to beta_max, clamped after the anneal window."""
    if total_anneal_steps <= 0:
        raise InvalidConfig(f"total_anneal_steps must be > 0, got {total_anneal_steps}")
    return beta_max * min(1.0, step / total_anneal_steps)


def gather_targets(ids: torch.Tensor, spans: list[TargetSpan]) -> torch.Tensor:
    """Padded (B, L_max) tensor of the ground-truth target token ids."""
    L_max = max(s.length for s in spans)
    out = ids.new_zeros(ids.shape[0], L_max)
    for i, s in enumerate(spans):
        out[i, : s.length] = ids[i, s.start : s.stop]
    return out


def compute_loss(
    model: CLSM,
    ids: torch.Tensor,
    spans: list[TargetSpan],
    beta: float,
    noise: torch.Tensor | None = None,
) -> LossBreakdown:
    """Single-sample Monte-Carlo objective.

    One z̃ is drawn from the posterior by reparameterization and shared by
    the reconstruction term and the KL estimate
    log q(z̃|x,τ) − log p(z̃|x_C,τ). rec is the per-sample mean target-token
    log-likelihood averaged over the batch.
    """
    q = model.encode_posterior(ids, spans)
    z = q.sample(noise)
    base = model.prior_base_params(ids, spans)

    logits = model.decode_logits(ids, spans, z)
    logp = F.log_softmax(logits, dim=-1)
    targets = gather_targets(ids, spans)
    tok_logp = logp.gather(-1, targets.unsqueeze(-1)).squeeze(-1)
    mask = target_mask(spans, tok_logp.shape[1], device=tok_logp.device)
    per_sample = (tok_logp * mask).sum(-1) / mask.sum(-1)
    rec = per_sample.mean()

    kl = (q.log_prob(z) - model.prior_log_density(z, base)).mean()
    total = -(rec - beta * kl)
    if not torch.isfinite(total):
        raise NumericalError("non-finite loss")
    return LossBreakdown(rec=rec, kl=kl, total=total, beta=beta)
