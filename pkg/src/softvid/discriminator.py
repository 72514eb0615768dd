"""Emotion-conditioned discriminator for adversarial training."""

from __future__ import annotations

import torch
import torch.nn as nn

from .config import ModelConfig
from .errors import ValidationError


class Discriminator(nn.Module):
    """Scores a frame as real given the emotion it should express.

    The emotion one-hot is tiled over the frame and concatenated with the
    RGB channels; four stride-2 convolutions with leaky ReLU, global
    average pooling, and a linear head produce one sigmoid probability.
    """

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.states = cfg.emotion_states
        layers = []
        prev = 3 + cfg.emotion_states
        for ch in cfg.disc_channels:
            layers += [nn.Conv2d(prev, ch, 4, 2, 1), nn.LeakyReLU(0.2, inplace=True)]
            prev = ch
        self.body = nn.Sequential(*layers)
        self.head = nn.Linear(prev, 1)

    def forward(self, frame: torch.Tensor, emotion: torch.Tensor) -> torch.Tensor:
        """frame (B, 3, H, W) + one-hot (B, states) -> probabilities (B,)."""
        if frame.ndim != 4 or frame.shape[1] != 3:
            raise ValidationError(f"expected (B, 3, H, W) frame, got {tuple(frame.shape)}")
        b, _, h, w = frame.shape
        if emotion.shape != (b, self.states):
            raise ValidationError(
                f"expected ({b}, {self.states}) one-hot, got {tuple(emotion.shape)}"
            )
        tiled = emotion.view(b, self.states, 1, 1).expand(b, self.states, h, w)
        feats = self.body(torch.cat([frame, tiled], dim=1)).mean(dim=(2, 3))
        return torch.sigmoid(self.head(feats)).squeeze(1)
