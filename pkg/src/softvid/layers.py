"""Shared building blocks."""

from __future__ import annotations

import torch.nn as nn
import torch.nn.functional as F


class ResidualBlock(nn.Module):
    """conv3x3 -> ReLU -> conv3x3 with identity skip, no normalization."""

    def __init__(self, channels):
        super().__init__()
        self.conv1 = nn.Conv2d(channels, channels, 3, 1, 1)
        self.conv2 = nn.Conv2d(channels, channels, 3, 1, 1)

    def forward(self, x):
        return x + self.conv2(F.relu(self.conv1(x), inplace=True))


class SubPixelUp(nn.Module):
    """x2 upsampling: conv to 4x channels, pixel shuffle, ReLU."""

    def __init__(self, in_channels, out_channels):
        super().__init__()
        self.conv = nn.Conv2d(in_channels, out_channels * 4, 3, 1, 1)
        self.shuffle = nn.PixelShuffle(2)

    def forward(self, x):
        return F.relu(self.shuffle(self.conv(x)), inplace=True)
