"""Causal transformer language model used only for evaluation NLL."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

from ..alphabet import ALPHABET
from ..errors import InvalidConfig
from ..model.checkpoint import save_checkpoint
from .config import TrainConfig
from .loop import encode_windows


@dataclass(frozen=True)
class LMConfig:
    token_embed: int = 128
    hidden: int = 256
    heads: int = 8
    n_layers: int = 2
    dropout: float = 0.1
    K: int = 128

    def __post_init__(self):
        if self.hidden % self.heads:
            raise InvalidConfig(f"hidden {self.hidden} not divisible by heads {self.heads}")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, payload: dict) -> "LMConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(payload) - known
        if unknown:
            raise InvalidConfig(f"unknown lm config keys: {sorted(unknown)}")
        return cls(**payload)


class EvalLM(nn.Module):
    """Left-to-right transformer over the 32-token data vocabulary.

    A private start row (index 32 of the input embedding) shifts the input
    so position t predicts token t from tokens < t.
    """

    BOS = ALPHABET.data_size

    def __init__(self, cfg: LMConfig):
        super().__init__()
        self.cfg = cfg
        self.tok = nn.Embedding(ALPHABET.data_size + 1, cfg.token_embed)
        self.pos = nn.Embedding(cfg.K, cfg.token_embed)
        self.proj = nn.Linear(cfg.token_embed, cfg.hidden)
        layer = nn.TransformerEncoderLayer(
            d_model=cfg.hidden,
            nhead=cfg.heads,
            dim_feedforward=2 * cfg.hidden,
            dropout=cfg.dropout,
            batch_first=True,
        )
        self.blocks = nn.TransformerEncoder(layer, num_layers=cfg.n_layers)
        self.out = nn.Linear(cfg.hidden, ALPHABET.data_size)

    def logits(self, ids: torch.Tensor) -> torch.Tensor:
        """(B, L, 32); position t is the distribution over token t."""
        B, L = ids.shape
        bos = ids.new_full((B, 1), self.BOS)
        inp = torch.cat([bos, ids[:, :-1]], dim=1)
        x = self.proj(self.tok(inp) + self.pos(torch.arange(L, device=ids.device)))
        causal = nn.Transformer.generate_square_subsequent_mask(L, device=ids.device)
        h = self.blocks(x, mask=causal)
        return self.out(h)

    def nll(self, ids: torch.Tensor) -> torch.Tensor:
        """Mean per-token negative log-likelihood of each row: (B,)."""
        logp = F.log_softmax(self.logits(ids), dim=-1)
        return -logp.gather(-1, ids.unsqueeze(-1)).squeeze(-1).mean(dim=-1)


def train_eval_lm(
    train_rows: list[list[str]],
    val_rows: list[list[str]],
    tcfg: TrainConfig,
    lm_cfg: LMConfig | None = None,
    out_dir: str | Path = "lm_out",
) -> Path:
    """Fit the LM on the train-2 split; returns the best checkpoint path."""
    lm_cfg = lm_cfg or LMConfig()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    best_path = out_dir / "best.pt"
    metrics_path = out_dir / "metrics.jsonl"

    torch.manual_seed(tcfg.seed)
    rng = np.random.default_rng(tcfg.seed)
    ids_train = encode_windows(train_rows)
    ids_val = encode_windows(val_rows)

    model = EvalLM(lm_cfg)
    opt = torch.optim.Adam(
        model.parameters(), lr=tcfg.lr, betas=(tcfg.adam_beta1, tcfg.adam_beta2)
    )
    config_dict = {"lm": lm_cfg.to_dict(), "train": tcfg.to_dict()}
    n = ids_train.shape[0]
    best_val = math.inf
    step = 0

    def val_nll() -> float:
        model.eval()
        with torch.no_grad():
            return float(
                torch.cat(
                    [model.nll(ids_val[a : a + tcfg.batch]) for a in range(0, len(ids_val), tcfg.batch)]
                ).mean()
            )

    with metrics_path.open("w", encoding="utf-8") as log:
        for epoch in range(1, tcfg.epochs + 1):
            perm = rng.permutation(n)
            model.train()
            for a in range(0, n, tcfg.batch):
                ids = ids_train[torch.from_numpy(perm[a : a + tcfg.batch])]
                loss = model.nll(ids).mean()
                opt.zero_grad()
                loss.backward()
                torch.nn.utils.clip_grad_norm_(model.parameters(), 5.0)
                opt.step()
                log.write(json.dumps({"step": step, "nll": float(loss.detach())}) + "\n")
                step += 1
            v = val_nll()
            log.write(json.dumps({"kind": "validation", "epoch": epoch, "val_nll": v}) + "\n")
            if v < best_val:
                best_val = v
                save_checkpoint(best_path, "lm", config_dict, model)
    save_checkpoint(out_dir / "final.pt", "lm", config_dict, model)
    if not best_path.exists():
        save_checkpoint(best_path, "lm", config_dict, model)
    return best_path


def load_eval_lm(path: str | Path) -> EvalLM:
    from ..model.checkpoint import load_checkpoint, restore_into

    payload = load_checkpoint(path, expect_kind="lm")
    model = EvalLM(LMConfig.from_dict(payload["config"]["lm"]))
    restore_into(model, payload, path)
    model.eval()
    return model
