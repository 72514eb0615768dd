"""Training objective: pixel loss, adversarial terms, and their weighted sum."""

from __future__ import annotations

from dataclasses import dataclass

import torch

from .emotion_branch import au_loss
from .errors import ValidationError

LOG_EPS = 1e-8


@dataclass
class LossBreakdown:
    """Per-term generator losses; total is the optimized scalar."""

    l1: torch.Tensor
    adv: torch.Tensor
    au: torch.Tensor
    total: torch.Tensor
    lambda_adv: float
    lambda_au: float

    def detached(self) -> dict[str, float]:
        return {
            "l1": float(self.l1.detach()),
            "adv": float(self.adv.detach()),
            "au": float(self.au.detach()),
            "total": float(self.total.detach()),
        }


def generator_adv_loss(p: torch.Tensor) -> torch.Tensor:
    """Mean of -log p over the batch, with p floored for safety."""
    return -torch.log(p.clamp_min(LOG_EPS)).mean()


def discriminator_loss(p_real: torch.Tensor, p_fake: torch.Tensor) -> torch.Tensor:
    """Mean of -log p_real - log(1 - p_fake), both terms floored."""
    real_term = -torch.log(p_real.clamp_min(LOG_EPS)).mean()
    fake_term = -torch.log((1 - p_fake).clamp_min(LOG_EPS)).mean()
    return real_term + fake_term


def total_loss(
    restored: torch.Tensor,
    target: torch.Tensor,
    p_fake: torch.Tensor | None,
    au_pred: torch.Tensor,
    au_target: torch.Tensor,
    lambda_adv: float,
    lambda_au: float,
    adv_enabled: bool,
) -> LossBreakdown:
    """Weighted generator objective.

    The pixel term is the mean absolute error; the adversarial term is
    the non-saturating -log p of the discriminator on restored frames,
    reported as exactly zero while adv_enabled is off.
    """
    if restored.shape != target.shape:
        raise ValidationError(
            f"restored {tuple(restored.shape)} vs target {tuple(target.shape)}"
        )
    l1 = (restored - target).abs().mean()
    if adv_enabled:
        if p_fake is None:
            raise ValidationError("adversarial term enabled but no scores given")
        adv = generator_adv_loss(p_fake)
    else:
        adv = torch.zeros((), dtype=restored.dtype, device=restored.device)
    au = au_loss(au_pred, au_target)
    total = l1 + lambda_adv * adv + lambda_au * au
    return LossBreakdown(l1, adv, au, total, lambda_adv, lambda_au)
