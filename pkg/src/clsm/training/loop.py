"""Seeded optimization loop with annealing, validation, and checkpoints."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from ..alphabet import ALPHABET
from ..corpus.spans import sample_target_span
from ..errors import InsufficientData, NumericalError
from ..model.checkpoint import save_checkpoint
from .config import TrainConfig
from .loss import LossBreakdown, beta_schedule, compute_loss

GRAD_CLIP = 5.0
VAL_SEED_OFFSET = 7919  # decorrelates validation draws from training draws


def encode_windows(rows: list[list[str]]) -> torch.Tensor:
    """Token windows to a (N, K) long tensor of alphabet ids."""
    if not rows:
        raise InsufficientData("no windows to encode")
    return torch.tensor([ALPHABET.encode_seq(w) for w in rows], dtype=torch.long)


@dataclass
class FitResult:
    best_path: Path
    final_path: Path
    metrics_path: Path
    history: list[dict] = field(default_factory=list)
    aborted: bool = False


def evaluate(model, ids_all: torch.Tensor, beta: float, batch: int, seed: int) -> dict:
    """Mean loss terms over a full pass; spans and reparameterization noise
    are drawn from fixed-seed generators so repeated calls are comparable."""
    rng = np.random.default_rng(seed)
    gen = torch.Generator().manual_seed(seed)
    model.eval()
    sums = {"rec": 0.0, "kl": 0.0, "total": 0.0}
    n = ids_all.shape[0]
    with torch.no_grad():
        for a in range(0, n, batch):
            ids = ids_all[a : a + batch]
            spans = [sample_target_span(rng) for _ in range(ids.shape[0])]
            noise = torch.randn(ids.shape[0], model.latent_dim, generator=gen)
            out = model.loss(ids, spans, beta, noise=noise)
            for k in sums:
                sums[k] += float(getattr(out, k)) * ids.shape[0]
    return {k: v / n for k, v in sums.items()}


def fit(
    model,
    train_rows: list[list[str]],
    val_rows: list[list[str]],
    model_cfg_dict: dict,
    tcfg: TrainConfig,
    out_dir: str | Path,
    kind: str = "clsm",
) -> FitResult:
    """Adam over ``tcfg.epochs`` with per-iteration span resampling.

    The model must expose ``loss(ids, spans, beta, noise=None)`` returning a
    LossBreakdown and a ``latent_dim`` attribute. Writes step records and
    per-epoch validation records to metrics.jsonl; keeps the best-validation
    and final checkpoints. A non-finite loss aborts before the parameter
    update, so the saved weights are the last good ones.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    metrics_path = out_dir / "metrics.jsonl"
    best_path = out_dir / "best.pt"
    final_path = out_dir / "final.pt"

    torch.manual_seed(tcfg.seed)
    rng = np.random.default_rng(tcfg.seed)
    ids_train = encode_windows(train_rows)
    ids_val = encode_windows(val_rows)

    opt = torch.optim.Adam(
        model.parameters(), lr=tcfg.lr, betas=(tcfg.adam_beta1, tcfg.adam_beta2)
    )
    n = ids_train.shape[0]
    steps_per_epoch = math.ceil(n / tcfg.batch)
    anneal_steps = tcfg.anneal_epochs * steps_per_epoch
    config_dict = {"model": model_cfg_dict, "train": tcfg.to_dict()}

    result = FitResult(best_path, final_path, metrics_path)
    best_val = float("inf")
    step = 0

    def run_validation(epoch: int):
        nonlocal best_val
        record = evaluate(model, ids_val, tcfg.beta_max, tcfg.batch, tcfg.seed + VAL_SEED_OFFSET)
        record.update(epoch=epoch, step=step, kind="validation")
        result.history.append(record)
        log.write(json.dumps(record) + "\n")
        log.flush()
        if record["total"] < best_val:
            best_val = record["total"]
            save_checkpoint(best_path, kind, config_dict, model)

    with metrics_path.open("w", encoding="utf-8") as log:
        run_validation(epoch=0)
        for epoch in range(1, tcfg.epochs + 1):
            perm = rng.permutation(n)
            for a in range(0, n, tcfg.batch):
                ids = ids_train[torch.from_numpy(perm[a : a + tcfg.batch])]
                spans = [sample_target_span(rng) for _ in range(ids.shape[0])]
                beta = beta_schedule(step, anneal_steps, tcfg.beta_max)
                model.train()
                try:
                    out: LossBreakdown = model.loss(ids, spans, beta)
                except NumericalError:
                    result.aborted = True
                    log.write(json.dumps({"kind": "aborted", "step": step}) + "\n")
                    break
                opt.zero_grad()
                out.total.backward()
                torch.nn.utils.clip_grad_norm_(model.parameters(), GRAD_CLIP)
                opt.step()
                log.write(json.dumps({"step": step, **out.floats()}) + "\n")
                step += 1
            if result.aborted:
                break
            run_validation(epoch)

    save_checkpoint(final_path, kind, config_dict, model)
    if not best_path.exists():
        save_checkpoint(best_path, kind, config_dict, model)
    return result
