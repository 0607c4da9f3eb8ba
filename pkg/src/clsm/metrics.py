"""Evaluation metrics: interpolation smoothness, LM-based NLL, and
left-contextual reconstruction accuracy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from .alphabet import ALPHABET
from .baseline_vae import SequenceVAE, vae_greedy_decode, vae_interpolate
from .corpus.spans import SPAN_LENGTHS, TargetSpan
from .errors import EmptyEvaluation, InvalidInput
from .model.clsm import CLSM
from .sampler import greedy_decode_target, interpolate_contextual, sample_from_prior
from .training.lm import EvalLM


def edit_distance(a: list[str], b: list[str]) -> int:
    """Unit-cost Levenshtein distance over tokens, O(min(|a|,|b|)) space."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[len(b)]


@dataclass(frozen=True)
class IEDRReport:
    J: int
    ratio: float
    n_excluded_pairs: int
    n_excluded_paths: int
    n_paths: int


def interpolation_edit_distance_ratio(
    interp_fn, contexts: list[tuple[list, list, TargetSpan]], J: int, generator: torch.Generator
) -> IEDRReport:
    """Mean over interpolation paths of Σ adjacent edit distances divided by
    D·(J−n), where D is the endpoint distance and n the number of zero
    adjacent distances; paths with D·(J−n)=0 are excluded.

    ``interp_fn(left, right, span, J, generator)`` must return the J+1
    interpolated target sequences.
    """
    ratios, excluded_pairs, excluded_paths = [], 0, 0
    for left, right, span in contexts:
        targets = interp_fn(left, right, span, J, generator)
        if len(targets) != J + 1:
            raise InvalidInput(f"adapter returned {len(targets)} sequences, wanted {J + 1}")
        adjacent = [edit_distance(targets[j], targets[j + 1]) for j in range(J)]
        D = edit_distance(targets[0], targets[J])
        n = sum(1 for d in adjacent if d == 0)
        if D * (J - n) == 0:
            excluded_paths += 1
            continue
        ratio = sum(adjacent) / (D * (J - n))
        assert ratio >= 1.0 / (J - n) - 1e-12, "triangle inequality violated"
        ratios.append(ratio)
        excluded_pairs += n
    if not ratios:
        raise EmptyEvaluation("every interpolation path was excluded (D(J-n)=0)")
    return IEDRReport(
        J=J,
        ratio=float(np.mean(ratios)),
        n_excluded_pairs=excluded_pairs,
        n_excluded_paths=excluded_paths,
        n_paths=len(ratios),
    )


def clsm_interpolation_adapter(model: CLSM):
    """Endpoints drawn from the conditional prior; path linear in W."""

    def interp(left, right, span, J, generator):
        z1 = sample_from_prior(model, left, right, span, generator)
        z2 = sample_from_prior(model, left, right, span, generator)
        windows = interpolate_contextual(model, z1, z2, J, left, right, span)
        return [w[span.start : span.stop] for w in windows]

    return interp


def vae_interpolation_adapter(model: SequenceVAE):
    """Endpoints drawn from the standard-normal prior; path linear in Z."""

    def interp(left, right, span, J, generator):
        z1 = torch.randn(1, model.cfg.d_z, generator=generator)
        z2 = torch.randn(1, model.cfg.d_z, generator=generator)
        windows = vae_interpolate(model, z1, z2, J, left, right, span)
        return [w[span.start : span.stop] for w in windows]

    return interp


def lm_nll(samples: list[list[str]], lm: EvalLM) -> float:
    """Mean per-token NLL of full sequences under the causal LM."""
    if not samples:
        raise EmptyEvaluation("no samples to score")
    ids = torch.tensor([ALPHABET.encode_seq(s) for s in samples])
    if int(ids.max()) >= ALPHABET.data_size:
        raise InvalidInput("sample contains non-data tokens")
    lm.eval()
    with torch.no_grad():
        return float(lm.nll(ids).mean())


def left_contextual_recon_accuracy(
    model: CLSM, windows: list[list[str]], rng: np.random.Generator
) -> float:
    """Token-exact reconstruction rate for spans that end the window.

    The target is encoded with its full window, z is the posterior mean, and
    the greedy decode is compared position-by-position against the truth.
    """
    if not windows:
        raise EmptyEvaluation("no windows to evaluate")
    K = model.cfg.K
    model.eval()
    fractions = []
    for w in windows:
        length = int(rng.choice(SPAN_LENGTHS))
        span = TargetSpan(start=K - length, length=length)
        ids = torch.tensor([ALPHABET.encode_seq(w)])
        with torch.no_grad():
            z = model.encode_posterior(ids, [span]).mean
        decoded = greedy_decode_target(model, z, w[: span.start], [], span)
        truth = w[span.start :]
        fractions.append(sum(a == b for a, b in zip(decoded, truth)) / length)
    return float(np.mean(fractions))


def vae_left_recon_accuracy(
    model: SequenceVAE, windows: list[list[str]], rng: np.random.Generator
) -> float:
    """Same protocol as :func:`left_contextual_recon_accuracy` but the
    posterior mean comes from the sequence VAE encoder."""
    if not windows:
        raise EmptyEvaluation("no windows to evaluate")
    K = model.cfg.K
    model.eval()
    fractions = []
    for w in windows:
        length = int(rng.choice(SPAN_LENGTHS))
        span = TargetSpan(start=K - length, length=length)
        ids = torch.tensor([ALPHABET.encode_seq(w)])
        with torch.no_grad():
            z = model.encode(ids).mean
        decoded = vae_greedy_decode(model, z, w[: span.start], length)
        truth = w[span.start :]
        fractions.append(sum(a == b for a, b in zip(decoded, truth)) / length)
    return float(np.mean(fractions))
