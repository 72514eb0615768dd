"""Action-unit prediction and the per-channel gate derived from it."""

from __future__ import annotations

import torch
import torch.nn as nn

from .config import ModelConfig
from .errors import ValidationError
from .features import ChannelAttention, FeatureMaps


class AuPredictor(nn.Module):
    """Predicts the center frame's action-unit intensities.

    The video maps are average-pooled per channel and concatenated with
    the emotion one-hot; three linear blocks (ReLU + dropout) and a
    linear head produce the 17 predictions.
    """

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.states = cfg.emotion_states
        dims = [cfg.video_channels + cfg.emotion_states, *cfg.au_hidden]
        blocks = []
        for d_in, d_out in zip(dims[:-1], dims[1:]):
            blocks += [nn.Linear(d_in, d_out), nn.ReLU(inplace=True), nn.Dropout(cfg.au_dropout)]
        self.body = nn.Sequential(*blocks)
        self.head = nn.Linear(dims[-1], cfg.au_dim)

    def forward(self, fv: FeatureMaps, emotion: torch.Tensor) -> torch.Tensor:
        maps = fv.expect("video")
        if emotion.ndim != 2 or emotion.shape[-1] != self.states:
            raise ValidationError(
                f"expected (B, {self.states}) one-hot, got {tuple(emotion.shape)}"
            )
        pooled = maps.mean(dim=(2, 3))
        return self.head(self.body(torch.cat([pooled, emotion], dim=1)))


class ChannelGate(nn.Module):
    """Maps predicted action units to a per-channel gate in (0, 1)."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        dims = [cfg.au_dim, *cfg.gate_hidden]
        layers = []
        for d_in, d_out in zip(dims[:-1], dims[1:]):
            layers += [nn.Linear(d_in, d_out), nn.ReLU(inplace=True)]
        layers.append(nn.Linear(dims[-1], cfg.video_channels))
        self.body = nn.Sequential(*layers)

    def forward(self, au_pred: torch.Tensor) -> ChannelAttention:
        return ChannelAttention(torch.sigmoid(self.body(au_pred)))


def au_loss(pred: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    """Squared L2 deviation, summed over the 17 units.

    For batched inputs the per-sample sums are averaged, keeping the loss
    magnitude independent of batch size.
    """
    if pred.shape != target.shape:
        raise ValidationError(
            f"prediction {tuple(pred.shape)} vs target {tuple(target.shape)}"
        )
    per_sample = ((pred - target) ** 2).sum(dim=-1)
    return per_sample.mean() if per_sample.ndim else per_sample
