"""Model and training configuration.

Two dataclasses drive everything: ``ModelConfig`` fixes the network
topology (resolutions, channel widths, depths) and ``TrainConfig`` the
optimization schedule.  ``ModelConfig.miniature()`` is a shrunken variant
for CI: same topology, roughly 1/8 the channel widths and a 16x24
low-quality resolution (the smallest grid divisible by the audio branch's
three x2 upsampling stages).
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, asdict, replace
from pathlib import Path

import yaml

from .errors import FormatError, ValidationError


@dataclass(frozen=True)
class ModelConfig:
    """Network topology constants.

    The low-quality grid is ``lq_height x lq_width``; the restored output is
    ``scale`` times larger on each axis.  ``window_half`` is the temporal
    half-width: the network consumes ``2 * window_half + 1`` frames.
    """

    lq_height: int = 72
    lq_width: int = 120
    scale: int = 4
    window_half: int = 2
    mfcc_dim: int = 13

    # video branch
    video_channels: int = 64
    video_blocks: int = 4
    align_kernel: int = 3
    plain_alignment: bool = False

    # audio branch
    audio_hidden: int = 128
    audio_layers: int = 3
    audio_base_channels: int = 15
    audio_up_channels: tuple[int, ...] = (32, 64, 64)

    # emotion branch
    emotion_states: int = 15
    au_dim: int = 17
    au_hidden: tuple[int, ...] = (128, 128, 64)
    au_dropout: float = 0.5
    gate_hidden: tuple[int, ...] = (64, 64)

    # fusion + reconstruction
    embed_channels: int = 32
    recon_blocks: int = 10

    # discriminator
    disc_channels: tuple[int, ...] = (64, 128, 256, 512)

    @property
    def hq_height(self) -> int:
        return self.lq_height * self.scale

    @property
    def hq_width(self) -> int:
        return self.lq_width * self.scale

    @property
    def window_len(self) -> int:
        return 2 * self.window_half + 1

    @property
    def audio_base_grid(self) -> tuple[int, int]:
        """Spatial grid the audio feature vector is reshaped to (h, w)."""
        n_up = len(self.audio_up_channels)
        return self.lq_height >> n_up, self.lq_width >> n_up

    def validate(self) -> "ModelConfig":
        up = 1 << len(self.audio_up_channels)
        if self.lq_height % up or self.lq_width % up:
            raise ValidationError(
                f"low-quality dims ({self.lq_height}x{self.lq_width}) must be "
                f"divisible by {up} for the audio upsampling stages"
            )
        if self.audio_up_channels[-1] != self.video_channels:
            raise ValidationError(
                "last audio upsampling width must equal video_channels"
            )
        if self.scale & (self.scale - 1) or self.scale < 2:
            raise ValidationError("scale must be a power of two >= 2")
        if self.window_half < 0:
            raise ValidationError("window_half must be >= 0")
        return self

    @classmethod
    def miniature(cls) -> "ModelConfig":
        return cls(
            lq_height=16,
            lq_width=24,
            window_half=1,
            video_channels=8,
            audio_hidden=16,
            audio_up_channels=(4, 8, 8),
            au_hidden=(16, 16, 8),
            gate_hidden=(8, 8),
            embed_channels=4,
            disc_channels=(8, 16, 32, 64),
        ).validate()


@dataclass(frozen=True)
class TrainConfig:
    """Optimization schedule and reproducibility knobs."""

    batch_size: int = 8
    lr: float = 1e-4
    beta1: float = 0.5
    beta2: float = 0.9
    lambda_adv: float = 0.01
    lambda_au: float = 0.001
    warmup_epochs: int = 2
    epochs: int = 4
    seed: int = 0
    deterministic: bool = False
    miniature: bool = False
    n: int = 2  # temporal window half-width

    def validate(self) -> "TrainConfig":
        for name in ("batch_size", "lr", "epochs"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")
        if self.warmup_epochs < 0 or self.warmup_epochs > self.epochs:
            raise ValidationError("need 0 <= warmup_epochs <= epochs")
        return self

    def model(self) -> ModelConfig:
        if self.miniature:
            base = ModelConfig.miniature()
            if self.n != base.window_half:
                base = replace(base, window_half=self.n)
        else:
            base = ModelConfig(window_half=self.n)
        return base.validate()


def load_overrides(path: str | Path) -> dict:
    """Read a YAML config file of TrainConfig overrides, rejecting unknown keys."""
    with open(path) as f:
        raw = yaml.safe_load(f) or {}
    if not isinstance(raw, dict):
        raise FormatError(f"config file {path} must contain a mapping")
    known = {f.name for f in fields(TrainConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ValidationError(f"unknown config keys in {path}: {', '.join(unknown)}")
    return raw


def train_config(overrides: dict | None = None, **kwargs) -> TrainConfig:
    """Build a validated TrainConfig from file overrides plus keyword flags.

    Flag values (kwargs) win over file overrides; miniature mode defaults
    n to 1 unless explicitly set.
    """
    merged: dict = {}
    merged.update(overrides or {})
    merged.update({k: v for k, v in kwargs.items() if v is not None})
    if merged.get("miniature") and "n" not in merged:
        merged["n"] = 1
    known = {f.name for f in fields(TrainConfig)}
    unknown = sorted(set(merged) - known)
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
    return TrainConfig(**merged).validate()


def config_dict(cfg) -> dict:
    """Plain-dict snapshot of a config dataclass (for logs and checkpoints)."""
    d = asdict(cfg)
    for k, v in d.items():
        if isinstance(v, tuple):
            d[k] = list(v)
    return d


def model_config_from_dict(d: dict) -> ModelConfig:
    """Rebuild a ModelConfig from a ``config_dict`` snapshot."""
    known = {f.name for f in fields(ModelConfig)}
    unknown = sorted(set(d) - known)
    if unknown:
        raise FormatError(f"unknown model config keys: {', '.join(unknown)}")
    kwargs = {k: tuple(v) if isinstance(v, list) else v for k, v in d.items()}
    return ModelConfig(**kwargs).validate()
