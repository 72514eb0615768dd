"""Cross-modality fusion stages.

First the audio maps are gated per position by how well they agree with
the video maps (a sigmoid of an embedded inner product) and merged by a
1x1 convolution.  Then the merged maps are gated per channel by the
emotion-derived attention, concatenated with the tiled emotion one-hot,
and merged again.
"""

from __future__ import annotations

import torch
import torch.nn as nn

from .config import ModelConfig
from .errors import ValidationError
from .features import AttentionMap, ChannelAttention, FeatureMaps


class SpatialAttention(nn.Module):
    """Per-position agreement gate between video and audio maps.

    Both map stacks are embedded by 1x1 convolutions to a shared width;
    the gate at each position is the sigmoid of the inner product of the
    two embedding vectors there.
    """

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        c, e = cfg.video_channels, cfg.embed_channels
        self.embed_video = nn.Conv2d(c, e, 1)
        self.embed_audio = nn.Conv2d(c, e, 1)

    def forward(self, fv: FeatureMaps, fa: FeatureMaps) -> AttentionMap:
        v = fv.expect("video")
        a = fa.expect("audio")
        if v.shape != a.shape:
            raise ValidationError(
                f"video {tuple(v.shape)} vs audio {tuple(a.shape)} maps"
            )
        inner = (self.embed_video(v) * self.embed_audio(a)).sum(dim=1, keepdim=True)
        return AttentionMap(torch.sigmoid(inner))


class AudioVideoFusion(nn.Module):
    """Merge video maps with gated audio maps via a 1x1 convolution."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        c = cfg.video_channels
        self.merge = nn.Conv2d(2 * c, c, 1)

    def forward(self, fv: FeatureMaps, fa: FeatureMaps, gate: AttentionMap) -> FeatureMaps:
        v = fv.expect("video")
        a = fa.expect("audio")
        if v.shape != a.shape or gate.data.shape[-2:] != v.shape[-2:]:
            raise ValidationError("fusion inputs disagree on shape")
        merged = self.merge(torch.cat([v, gate.data * a], dim=1))
        return FeatureMaps(merged, "audio_video")


class TriModalFusion(nn.Module):
    """Scale channels by the emotion gate, append the tiled one-hot, merge."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        c = cfg.video_channels
        self.states = cfg.emotion_states
        self.merge = nn.Conv2d(c + cfg.emotion_states, c, 1)

    def forward(
        self, fva: FeatureMaps, gate: ChannelAttention, emotion: torch.Tensor
    ) -> FeatureMaps:
        maps = fva.expect("audio_video")
        b, c, h, w = maps.shape
        if gate.data.shape != (b, c):
            raise ValidationError(
                f"expected ({b}, {c}) channel gate, got {tuple(gate.data.shape)}"
            )
        if emotion.shape != (b, self.states):
            raise ValidationError(
                f"expected ({b}, {self.states}) one-hot, got {tuple(emotion.shape)}"
            )
        scaled = maps * gate.data.view(b, c, 1, 1)
        tiled = emotion.view(b, self.states, 1, 1).expand(b, self.states, h, w)
        merged = self.merge(torch.cat([scaled, tiled], dim=1))
        return FeatureMaps(merged, "trimodal")
