"""Generation-time procedures: prior sampling, greedy infilling,
latent interpolation, and latent variation."""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn.functional as F

from .alphabet import ALPHABET
from .corpus.spans import TargetSpan
from .corpus.windows import WINDOW_LEN
from .errors import InvalidInput, InvalidSpan
from .model.clsm import CLSM

MODES = ("random", "interpolate", "vary")


@dataclass(frozen=True)
class GenerationRequest:
    left: tuple[str, ...]
    right: tuple[str, ...]
    span: TargetSpan
    mode: str = "random"
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidInput(f"unknown mode {self.mode!r}")
        if len(self.left) != self.span.start:
            raise InvalidSpan(
                f"left context length {len(self.left)} must equal span start {self.span.start}"
            )
        if len(self.left) + self.span.length + len(self.right) != WINDOW_LEN:
            raise InvalidSpan(
                f"contexts plus span must cover exactly {WINDOW_LEN} steps, got "
                f"{len(self.left) + self.span.length + len(self.right)}"
            )
        for tok in (*self.left, *self.right):
            if not ALPHABET.is_data_token(tok):
                raise InvalidInput(f"context token {tok!r} not in data vocabulary")


def assemble_window(left, target, right) -> list[str]:
    return [*left, *target, *right]


def _context_ids(model: CLSM, left, right, span: TargetSpan) -> torch.Tensor:
    """(1, K) ids with an arbitrary filler in the target gap; every consumer
    of this tensor masks the gap out before looking at it."""
    if len(left) != span.start or len(left) + span.length + len(right) != model.cfg.K:
        raise InvalidSpan("context lengths do not tile the window around the span")
    filler = [ALPHABET.decode(ALPHABET.rest_id)] * span.length
    return torch.tensor([ALPHABET.encode_seq(assemble_window(left, filler, right))])


def sample_from_prior(
    model: CLSM, left, right, span: TargetSpan, generator: torch.Generator | None = None
) -> torch.Tensor:
    """z = f⁻¹(w̃) with w̃ drawn from the conditional base Gaussian; (1, d_z)."""
    ids = _context_ids(model, left, right, span)
    model.eval()
    with torch.no_grad():
        base = model.prior_base_params(ids, [span])
        noise = torch.randn(base.mean.shape, generator=generator)
        w = base.mean + base.std * noise
        return model.flow.inverse(w)


def greedy_decode_target(
    model: CLSM,
    z: torch.Tensor,
    left,
    right,
    span: TargetSpan,
    temperature: float = 0.0,
    generator: torch.Generator | None = None,
) -> list[str]:
    """Left-to-right argmax infilling of the target gap.

    Each position re-runs the full decoder on the window with the generated
    prefix written in; temperature > 0 switches argmax to sampling (never
    used by evaluations).
    """
    ids = _context_ids(model, left, right, span)
    model.eval()
    with torch.no_grad():
        for i in range(span.length):
            logits = model.decode_logits(ids, [span], z)[0, i]
            if temperature > 0:
                probs = F.softmax(logits / temperature, dim=-1)
                tok = int(torch.multinomial(probs, 1, generator=generator))
            else:
                tok = int(logits.argmax())
            ids[0, span.start + i] = tok
    return ALPHABET.decode_seq(ids[0, span.start : span.stop])


def interpolate_contextual(
    model: CLSM, z1: torch.Tensor, z2: torch.Tensor, J: int, left, right, span: TargetSpan
) -> list[list[str]]:
    """J+1 full windows along the straight line between f(z1) and f(z2);
    the endpoints use z1 and z2 verbatim."""
    if J < 1:
        raise InvalidInput(f"J must be >= 1, got {J}")
    model.eval()
    with torch.no_grad():
        w1, _ = model.flow(z1)
        w2, _ = model.flow(z2)
        out = []
        for j in range(J + 1):
            if j == 0:
                zj = z1
            elif j == J:
                zj = z2
            else:
                alpha = j / J
                zj = model.flow.inverse((1 - alpha) * w1 + alpha * w2)
            target = greedy_decode_target(model, zj, left, right, span)
            out.append(assemble_window(left, target, right))
    return out


def perturb_latent(
    model: CLSM,
    z: torch.Tensor,
    delta: float,
    left,
    right,
    span: TargetSpan,
    generator: torch.Generator | None = None,
) -> torch.Tensor:
    """z(δ) = f⁻¹(f(z) + δ·ε), ε drawn from the prior base covariance;
    δ=0 returns z itself."""
    if delta < 0:
        raise InvalidInput(f"delta must be >= 0, got {delta}")
    if delta == 0:
        return z
    model.eval()
    with torch.no_grad():
        ids = _context_ids(model, left, right, span)
        base = model.prior_base_params(ids, [span])
        eps = base.std * torch.randn(base.mean.shape, generator=generator)
        w, _ = model.flow(z)
        return model.flow.inverse(w + delta * eps)


def vary_contextual(
    model: CLSM,
    z: torch.Tensor,
    delta: float,
    left,
    right,
    span: TargetSpan,
    generator: torch.Generator | None = None,
) -> list[str]:
    """Perturbed-latent decode; δ=0 reproduces the input z's window exactly."""
    z_new = perturb_latent(model, z, delta, left, right, span, generator)
    target = greedy_decode_target(model, z_new, left, right, span)
    return assemble_window(left, target, right)
