"""Fused features to restored frame."""

from __future__ import annotations

import math

import torch
import torch.nn as nn

from .bicubic import bicubic_upscale
from .config import ModelConfig
from .errors import ValidationError
from .features import FeatureMaps
from .layers import ResidualBlock, SubPixelUp


class Reconstructor(nn.Module):
    """Residual trunk, sub-pixel upsampling, and a global bicubic skip.

    The trunk's output is added to a bicubic upscale of the low-quality
    center frame, so with all trunk weights at zero (and scaled down at
    init) the restoration starts from the bicubic baseline instead of
    noise.  Output is clamped to [0, 1] unless asked not to.
    """

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        c = cfg.video_channels
        self.scale = cfg.scale
        self.blocks = nn.Sequential(*[ResidualBlock(c) for _ in range(cfg.recon_blocks)])
        n_up = int(math.log2(cfg.scale))
        self.ups = nn.Sequential(*[SubPixelUp(c, c) for _ in range(n_up)])
        self.to_rgb = nn.Conv2d(c, 3, 3, 1, 1)
        # keep the initial trunk contribution small so early outputs stay
        # near the bicubic skip
        with torch.no_grad():
            self.to_rgb.weight.mul_(0.1)
            self.to_rgb.bias.zero_()

    def forward(
        self, fused: FeatureMaps, lq_center: torch.Tensor, clamp: bool = True
    ) -> torch.Tensor:
        """fused (B, C, h, w) + lq_center (B, 3, h, w) -> (B, 3, h*s, w*s)."""
        maps = fused.expect("trimodal")
        if lq_center.ndim != 4 or lq_center.shape[1] != 3:
            raise ValidationError(
                f"expected (B, 3, h, w) center frame, got {tuple(lq_center.shape)}"
            )
        if lq_center.shape[-2:] != maps.shape[-2:]:
            raise ValidationError(
                f"center frame {tuple(lq_center.shape[-2:])} does not match "
                f"feature grid {tuple(maps.shape[-2:])}"
            )
        detail = self.to_rgb(self.ups(self.blocks(maps)))
        out = detail + bicubic_upscale(lq_center, self.scale)
        return out.clamp(0.0, 1.0) if clamp else out
