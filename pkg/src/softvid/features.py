"""Tagged feature containers passed between network stages.

Each branch returns its maps wrapped with a modality tag, and each fusion
stage checks the tags of what it is handed.  The tags make cross-wiring
(say, feeding audio maps where video maps belong) a loud error instead of
a silently wrong model.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch

from .errors import ValidationError

MODALITIES = ("video", "audio", "audio_video", "trimodal")


@dataclass
class FeatureMaps:
    """A (B, C, H, W) feature tensor plus the modality it came from."""

    data: torch.Tensor
    modality: str

    def __post_init__(self):
        if self.modality not in MODALITIES:
            raise ValidationError(
                f"unknown modality {self.modality!r}; expected one of {MODALITIES}"
            )
        if self.data.ndim != 4:
            raise ValidationError(
                f"feature maps must be (B, C, H, W), got shape {tuple(self.data.shape)}"
            )

    def expect(self, modality: str) -> torch.Tensor:
        if self.modality != modality:
            raise ValidationError(
                f"expected {modality} features, got {self.modality}"
            )
        return self.data


@dataclass
class AttentionMap:
    """Per-position gate in (0, 1), shape (B, 1, H, W)."""

    data: torch.Tensor

    def __post_init__(self):
        if self.data.ndim != 4 or self.data.shape[1] != 1:
            raise ValidationError(
                f"attention map must be (B, 1, H, W), got {tuple(self.data.shape)}"
            )


@dataclass
class ChannelAttention:
    """Per-channel gate in (0, 1), shape (B, C)."""

    data: torch.Tensor

    def __post_init__(self):
        if self.data.ndim != 2:
            raise ValidationError(
                f"channel attention must be (B, C), got {tuple(self.data.shape)}"
            )


def assert_gate_open(t: torch.Tensor, what: str) -> None:
    """Check a sigmoid-produced gate is finite and strictly inside (0, 1)."""
    if not torch.isfinite(t).all():
        raise ValidationError(f"{what} contains non-finite values")
    if t.min() <= 0 or t.max() >= 1:
        raise ValidationError(f"{what} left the open interval (0, 1)")
