"""Diagonal Gaussian parameter container and densities."""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch

LOG_HALF = math.log(0.5)


@dataclass
class GaussianParams:
    """mean and log_v tensors of shape (..., d); the variance is
    ½·exp(log_v), so log-variance proper is log_v + ln ½."""

    mean: torch.Tensor
    log_v: torch.Tensor

    @property
    def variance(self) -> torch.Tensor:
        return 0.5 * torch.exp(self.log_v)

    @property
    def std(self) -> torch.Tensor:
        return torch.sqrt(self.variance)

    def sample(self, noise: torch.Tensor | None = None) -> torch.Tensor:
        """Reparameterized draw; pass explicit standard-normal noise to pin it."""
        if noise is None:
            noise = torch.randn_like(self.mean)
        return self.mean + self.std * noise

    def log_prob(self, x: torch.Tensor) -> torch.Tensor:
        """Diagonal Gaussian log-density, summed over the last dim."""
        log_var = self.log_v + LOG_HALF
        out = -0.5 * (math.log(2 * math.pi) + log_var + (x - self.mean) ** 2 / self.variance)
        return out.sum(dim=-1)

    def detach(self) -> "GaussianParams":
        return GaussianParams(self.mean.detach(), self.log_v.detach())


def standard_normal(shape, dtype=torch.float32, device=None) -> GaussianParams:
    """N(0, I) expressed in the ½·exp parameterization (log_v = ln 2)."""
    mean = torch.zeros(shape, dtype=dtype, device=device)
    return GaussianParams(mean=mean, log_v=torch.full_like(mean, math.log(2.0)))


def kl_to_standard_normal(q: GaussianParams) -> torch.Tensor:
    """Analytic KL(q ‖ N(0, I)) summed over the last dim."""
    var = q.variance
    return 0.5 * (q.mean**2 + var - torch.log(var) - 1.0).sum(dim=-1)
