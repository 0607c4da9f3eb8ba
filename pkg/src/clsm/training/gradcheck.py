"""Finite-difference verification of the full objective's gradients."""

from __future__ import annotations

import torch

from ..corpus.spans import TargetSpan
from ..model.clsm import CLSM
from ..model.config import ModelConfig
from .loss import compute_loss

TINY_CONFIG = ModelConfig(
    d_z=4,
    l_z=2,
    token_embed=8,
    hidden=8,
    heads=2,
    dropout=0.0,
    mlp_hidden=8,
    n_transformer_layers=1,
    n_lstm_layers=1,
    n_coupling_layers=2,
    coupling_mlp_hidden=8,
    K=8,
)


def _build(seed: int) -> tuple[CLSM, torch.Tensor, list[TargetSpan], torch.Tensor, float]:
    torch.manual_seed(seed)
    model = CLSM(TINY_CONFIG).double().eval()
    with torch.no_grad():
        # kick the flow off its identity start so its parameters matter
        for layer in model.flow.layers:
            for net in (layer.scale_net, layer.bias_net):
                net[-1].weight.normal_(std=0.1)
                net[-1].bias.normal_(std=0.1)
    g = torch.Generator().manual_seed(seed + 1)
    ids = torch.randint(0, 32, (2, TINY_CONFIG.K), generator=g)
    spans = [TargetSpan(1, 3), TargetSpan(4, 4)]
    noise = torch.randn(2, TINY_CONFIG.d_z, generator=g, dtype=torch.float64)
    return model, ids, spans, noise, 0.5


def gradient_check(
    seed: int = 0,
    n_params: int = 50,
    step: float = 1e-5,
    sweep: tuple = (1e-3, 1e-4, 1e-5),
    tol: float = 1e-3,
) -> dict:
    """Compare backprop against central differences on a tiny double-precision
    model; returns a report with per-step-size errors and failing paths."""
    model, ids, spans, noise, beta = _build(seed)

    def objective() -> torch.Tensor:
        return compute_loss(model, ids, spans, beta, noise=noise).total

    loss = objective()
    model.zero_grad()
    loss.backward()

    named = [(name, p) for name, p in model.named_parameters() if p.requires_grad]
    g = torch.Generator().manual_seed(seed + 2)
    picks = []
    for _ in range(n_params):
        which = int(torch.randint(len(named), (1,), generator=g))
        name, p = named[which]
        flat = int(torch.randint(p.numel(), (1,), generator=g))
        picks.append((name, p, flat))

    def fd_grad(p: torch.Tensor, flat: int, h: float) -> float:
        with torch.no_grad():
            orig = p.view(-1)[flat].item()
            p.view(-1)[flat] = orig + h
            up = objective().item()
            p.view(-1)[flat] = orig - h
            down = objective().item()
            p.view(-1)[flat] = orig
        return (up - down) / (2 * h)

    def rel_err(a: float, b: float) -> float:
        return abs(a - b) / max(abs(a), abs(b), 1e-6)

    checks = []
    for name, p, flat in picks:
        bp = p.grad.view(-1)[flat].item()
        fd = fd_grad(p, flat, step)
        checks.append({"param": name, "index": flat, "bp": bp, "fd": fd, "rel_err": rel_err(bp, fd)})

    sweep_errs = {}
    for h in sweep:
        errs = [rel_err(p.grad.view(-1)[flat].item(), fd_grad(p, flat, h)) for _, p, flat in picks]
        sweep_errs[f"{h:.0e}"] = max(errs)

    max_err = max(c["rel_err"] for c in checks)
    failures = [c for c in checks if c["rel_err"] >= tol]
    return {
        "loss": loss.item(),
        "n_checked": len(checks),
        "max_rel_err": max_err,
        "passed": not failures,
        "failures": failures,
        "sweep": sweep_errs,
    }
