"""Audio feature extraction: sequence encoding and the lift to 2D maps."""

from __future__ import annotations

import torch
import torch.nn as nn

from .config import ModelConfig
from .errors import ValidationError
from .features import FeatureMaps
from .layers import SubPixelUp


class AudioEncoder(nn.Module):
    """Bidirectional recurrent encoder over the window's MFCC rows.

    Returns concat(final forward state, final backward state) of the top
    layer, a vector of length 2 * hidden.
    """

    def __init__(self, mfcc_dim: int = 13, hidden: int = 128, layers: int = 3):
        super().__init__()
        self.mfcc_dim = mfcc_dim
        self.hidden = hidden
        self.lstm = nn.LSTM(
            mfcc_dim, hidden, num_layers=layers, bidirectional=True, batch_first=True
        )

    @property
    def out_dim(self) -> int:
        return 2 * self.hidden

    def forward(self, mfcc: torch.Tensor) -> torch.Tensor:
        """mfcc: (B, T, mfcc_dim) -> (B, 2 * hidden)."""
        if mfcc.ndim != 3 or mfcc.shape[-1] != self.mfcc_dim:
            raise ValidationError(
                f"expected (B, T, {self.mfcc_dim}) coefficients, got {tuple(mfcc.shape)}"
            )
        _, (h_n, _) = self.lstm(mfcc)
        # h_n: (layers * 2, B, hidden); the last two rows are the top
        # layer's forward and backward final states
        return torch.cat([h_n[-2], h_n[-1]], dim=1)


def tie_directions(encoder: AudioEncoder) -> None:
    """Make the encoder symmetric under sequence reversal (diagnostic).

    Copies each layer's forward parameters onto the backward direction,
    and for layers past the first duplicates the input-weight halves so
    the layer is invariant to swapping its input's direction halves.
    Used by tests to check that the two directions really read the
    sequence in opposite orders; not meaningful for trained weights.
    """
    lstm = encoder.lstm
    with torch.no_grad():
        for layer in range(lstm.num_layers):
            for name in ("weight_ih", "weight_hh", "bias_ih", "bias_hh"):
                fwd = getattr(lstm, f"{name}_l{layer}")
                if layer > 0 and name == "weight_ih":
                    half = fwd.shape[1] // 2
                    fwd[:, half:] = fwd[:, :half]
                getattr(lstm, f"{name}_l{layer}_reverse").copy_(fwd)


class MapLifter(nn.Module):
    """Lift the encoder vector to spatial maps at the video resolution.

    A fully connected layer produces base_channels * bh * bw values that
    are reshaped channel-major to (base_channels, bh, bw), then each x2
    sub-pixel stage doubles the spatial size until the grid matches the
    video branch output.
    """

    def __init__(
        self,
        in_dim: int,
        base_channels: int,
        base_grid: tuple[int, int],
        up_channels: tuple[int, ...],
    ):
        super().__init__()
        self.base_channels = base_channels
        self.base_grid = base_grid
        self.fc = nn.Linear(in_dim, base_channels * base_grid[0] * base_grid[1])
        ups = []
        prev = base_channels
        for ch in up_channels:
            ups.append(SubPixelUp(prev, ch))
            prev = ch
        self.ups = nn.Sequential(*ups)

    def to_grid(self, flat: torch.Tensor) -> torch.Tensor:
        """Reshape (B, C*bh*bw) to (B, C, bh, bw), channel index slowest."""
        bh, bw = self.base_grid
        if flat.shape[-1] != self.base_channels * bh * bw:
            raise ValidationError(
                f"expected {self.base_channels * bh * bw} values, got {flat.shape[-1]}"
            )
        return flat.reshape(-1, self.base_channels, bh, bw)

    def forward(self, v: torch.Tensor) -> torch.Tensor:
        return self.ups(self.to_grid(self.fc(v)))


class AudioBranch(nn.Module):
    """Full audio path: MFCC window in, feature maps out."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.window_len = cfg.window_len
        self.encoder = AudioEncoder(cfg.mfcc_dim, cfg.audio_hidden, cfg.audio_layers)
        self.lifter = MapLifter(
            self.encoder.out_dim,
            cfg.audio_base_channels,
            cfg.audio_base_grid,
            cfg.audio_up_channels,
        )

    def forward(self, mfcc: torch.Tensor) -> FeatureMaps:
        if mfcc.shape[1] != self.window_len:
            raise ValidationError(
                f"expected {self.window_len} rows per window, got {mfcc.shape[1]}"
            )
        return FeatureMaps(self.lifter(self.encoder(mfcc)), "audio")
