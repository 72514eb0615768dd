"""Deformable convolution and the neighbor-to-center alignment block.

The deformable op displaces each kernel tap by a learned per-position 2D
offset and reads the input with bilinear interpolation (zero outside the
frame).  It is written as a small per-tap loop in plain tensor ops so the
zero-offset case degenerates to an ordinary convolution and gradients
flow to the offsets through the interpolation weights.
"""

from __future__ import annotations

import math

import torch
import torch.nn as nn

from .errors import ValidationError


def bilinear_sample(x: torch.Tensor, py: torch.Tensor, px: torch.Tensor) -> torch.Tensor:
    """Sample x at fractional positions, zero outside the frame.

    Args:
        x: (B, C, H, W) input.
        py, px: (B, H, W) absolute row/col sampling coordinates.

    Returns:
        (B, C, H, W) interpolated values.
    """
    b, c, h, w = x.shape
    y0 = py.floor()
    x0 = px.floor()
    wy = py - y0
    wx = px - x0
    flat = x.reshape(b, c, h * w)
    out = torch.zeros_like(x)
    for dy in (0, 1):
        for dx in (0, 1):
            yy = y0 + dy
            xx = x0 + dx
            weight = (wy if dy else 1 - wy) * (wx if dx else 1 - wx)
            inside = (yy >= 0) & (yy < h) & (xx >= 0) & (xx < w)
            idx = (yy.clamp(0, h - 1) * w + xx.clamp(0, w - 1)).long()
            vals = flat.gather(2, idx.reshape(b, 1, h * w).expand(b, c, h * w))
            out = out + vals.reshape(b, c, h, w) * (weight * inside).unsqueeze(1)
    return out


def deform_conv2d(
    x: torch.Tensor,
    offsets: torch.Tensor,
    weight: torch.Tensor,
    bias: torch.Tensor | None = None,
) -> torch.Tensor:
    """Stride-1, same-padded convolution with per-position tap offsets.

    Args:
        x: (B, C_in, H, W).
        offsets: (B, 2*K*K, H, W); for tap k (row-major over the kernel),
            channel 2k is the row offset and 2k+1 the column offset.
        weight: (C_out, C_in, K, K).
        bias: optional (C_out,).
    """
    b, c_in, h, w = x.shape
    c_out, c_in_w, k, k2 = weight.shape
    if k != k2 or c_in_w != c_in:
        raise ValidationError(f"weight shape {tuple(weight.shape)} does not fit input")
    if offsets.shape != (b, 2 * k * k, h, w):
        raise ValidationError(
            f"expected offsets {(b, 2 * k * k, h, w)}, got {tuple(offsets.shape)}"
        )
    pad = k // 2
    base_y = torch.arange(h, dtype=x.dtype, device=x.device).view(1, h, 1)
    base_x = torch.arange(w, dtype=x.dtype, device=x.device).view(1, 1, w)
    out = torch.zeros(b, c_out, h, w, dtype=x.dtype, device=x.device)
    for tap in range(k * k):
        ky, kx = divmod(tap, k)
        py = base_y + (ky - pad) + offsets[:, 2 * tap]
        px = base_x + (kx - pad) + offsets[:, 2 * tap + 1]
        sampled = bilinear_sample(x, py, px)
        out = out + torch.einsum("bchw,oc->bohw", sampled, weight[:, :, ky, kx])
    if bias is not None:
        out = out + bias.view(1, -1, 1, 1)
    return out


class AlignBlock(nn.Module):
    """Warps a neighbor frame's features onto the center frame.

    A regular convolution over concat(center, neighbor) predicts the tap
    offsets; it starts at zero so alignment begins as a plain convolution
    of the neighbor.  With ``plain=True`` the offsets stay fixed at zero
    (same code path, so both modes agree bit for bit at zero offsets).
    """

    def __init__(self, channels: int, kernel: int = 3, plain: bool = False):
        super().__init__()
        self.kernel = kernel
        self.plain = plain
        self.offset_conv = nn.Conv2d(2 * channels, 2 * kernel * kernel, 3, 1, 1)
        nn.init.zeros_(self.offset_conv.weight)
        nn.init.zeros_(self.offset_conv.bias)
        self.weight = nn.Parameter(torch.empty(channels, channels, kernel, kernel))
        self.bias = nn.Parameter(torch.zeros(channels))
        nn.init.kaiming_uniform_(self.weight, a=math.sqrt(5))
        bound = 1 / math.sqrt(channels * kernel * kernel)
        nn.init.uniform_(self.bias, -bound, bound)

    def forward(self, neighbor: torch.Tensor, center: torch.Tensor) -> torch.Tensor:
        if neighbor.shape != center.shape:
            raise ValidationError(
                f"neighbor {tuple(neighbor.shape)} vs center {tuple(center.shape)}"
            )
        b, _, h, w = neighbor.shape
        if self.plain:
            offsets = neighbor.new_zeros(b, 2 * self.kernel**2, h, w)
        else:
            offsets = self.offset_conv(torch.cat([center, neighbor], dim=1))
        return deform_conv2d(neighbor, offsets, self.weight, self.bias)
