"""Invertible affine-coupling flow between the latent spaces Z and W."""

from __future__ import annotations

import torch
import torch.nn as nn

from ..errors import NumericalError


def _coupling_mlp(d_in: int, d_out: int, hidden: int, leaky_slope: float) -> nn.Sequential:
    """Three linear layers; the final one starts at zero so the flow begins
    as the identity map."""
    net = nn.Sequential(
        nn.Linear(d_in, hidden),
        nn.LeakyReLU(leaky_slope),
        nn.Linear(hidden, hidden),
        nn.LeakyReLU(leaky_slope),
        nn.Linear(hidden, d_out),
    )
    nn.init.zeros_(net[-1].weight)
    nn.init.zeros_(net[-1].bias)
    return net


class AffineCoupling(nn.Module):
    """One coupling layer: half the dims pass through and condition an
    affine transform of the other half."""

    def __init__(self, d_z: int, hidden: int, leaky_slope: float, keep_first: bool):
        super().__init__()
        half = d_z // 2
        self.keep_first = keep_first
        self.scale_net = _coupling_mlp(half, d_z - half, hidden, leaky_slope)
        self.bias_net = _coupling_mlp(half, d_z - half, hidden, leaky_slope)

    def _split(self, v: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        half = v.shape[-1] // 2
        a, b = v[..., :half], v[..., half:]
        return (a, b) if self.keep_first else (b, a)

    def _join(self, keep: torch.Tensor, trans: torch.Tensor) -> torch.Tensor:
        pair = (keep, trans) if self.keep_first else (trans, keep)
        return torch.cat(pair, dim=-1)

    def forward(self, z: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        keep, trans = self._split(z)
        log_scale = torch.tanh(self.scale_net(keep))
        out = trans * torch.exp(log_scale) + self.bias_net(keep)
        return self._join(keep, out), log_scale.sum(dim=-1)

    def inverse(self, w: torch.Tensor) -> torch.Tensor:
        keep, trans = self._split(w)
        log_scale = torch.tanh(self.scale_net(keep))
        out = (trans - self.bias_net(keep)) * torch.exp(-log_scale)
        return self._join(keep, out)


class FlowStack(nn.Module):
    """f_λ: Z → W as a stack of coupling layers with alternating masks.

    ``forward`` returns (w, log|det ∂w/∂z|); the log-det is exactly the sum
    of the active scale outputs, no Jacobian is ever materialized.
    """

    def __init__(self, d_z: int, n_layers: int = 4, hidden: int = 256, leaky_slope: float = 0.01):
        super().__init__()
        self.d_z = d_z
        self.layers = nn.ModuleList(
            AffineCoupling(d_z, hidden, leaky_slope, keep_first=(i % 2 == 0))
            for i in range(n_layers)
        )

    def forward(self, z: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        if not torch.isfinite(z).all():
            raise NumericalError("non-finite input to flow")
        log_det = z.new_zeros(z.shape[:-1])
        w = z
        for layer in self.layers:
            w, ld = layer(w)
            log_det = log_det + ld
        return w, log_det

    def inverse(self, w: torch.Tensor) -> torch.Tensor:
        if not torch.isfinite(w).all():
            raise NumericalError("non-finite input to flow inverse")
        z = w
        for layer in reversed(self.layers):
            z = layer.inverse(z)
        return z
