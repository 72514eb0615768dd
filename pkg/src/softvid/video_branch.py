"""Video feature extraction over the temporal window."""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F

from .config import ModelConfig
from .deform import AlignBlock
from .errors import ValidationError
from .features import FeatureMaps
from .layers import ResidualBlock


class VideoBranch(nn.Module):
    """Aligned multi-frame features from the low-quality window.

    Each frame passes through a shared stem; every neighbor's stack is
    warped onto the center frame, the 2N+1 stacks are fused by a 1x1
    convolution over the stacked channels, and four residual blocks
    refine the result.
    """

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        c = cfg.video_channels
        self.window_len = cfg.window_len
        self.stem = nn.Conv2d(3, c, 3, 1, 1)
        self.align = AlignBlock(c, cfg.align_kernel, plain=cfg.plain_alignment)
        self.fuse = nn.Conv2d(cfg.window_len * c, c, 1)
        self.blocks = nn.Sequential(*[ResidualBlock(c) for _ in range(cfg.video_blocks)])

    def forward(self, window: torch.Tensor) -> FeatureMaps:
        """window: (B, 2N+1, 3, h, w) in [0, 1] -> FeatureMaps tagged video."""
        if window.ndim != 5 or window.shape[1] != self.window_len or window.shape[2] != 3:
            raise ValidationError(
                f"expected (B, {self.window_len}, 3, h, w) window, got {tuple(window.shape)}"
            )
        b, t, _, h, w = window.shape
        stacks = F.relu(self.stem(window.reshape(b * t, 3, h, w)), inplace=True)
        stacks = stacks.reshape(b, t, -1, h, w)
        center = t // 2
        aligned = [
            stacks[:, i] if i == center else self.align(stacks[:, i], stacks[:, center])
            for i in range(t)
        ]
        fused = F.relu(self.fuse(torch.cat(aligned, dim=1)), inplace=True)
        return FeatureMaps(self.blocks(fused), "video")
