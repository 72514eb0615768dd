"""Face-region quality metrics on the luma channel.

PSNR and SSIM are computed inside a per-frame face box rather than over
the whole frame, since the face is what the restoration is judged on.
Both work on BT.601 luma of [0, 1] RGB.  SSIM uses the standard 11x11
Gaussian window (sigma 1.5) over fully valid positions only, so the face
crop must be at least the window size.
"""

from __future__ import annotations

import math

import numpy as np
import torch
from scipy.signal import convolve2d

from .bicubic import bicubic_upscale
from .errors import ValidationError

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
K1 = 0.01
K2 = 0.03
PEAK = 1.0

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114], dtype=np.float64)


def luma(img: np.ndarray) -> np.ndarray:
    """BT.601 luma of channel-last RGB."""
    img = np.asarray(img, dtype=np.float64)
    if img.shape[-1] != 3:
        raise ValidationError(f"expected channel-last RGB, got shape {img.shape}")
    return img @ LUMA_WEIGHTS


def _checked_pair(ref: np.ndarray, test: np.ndarray, box) -> tuple[np.ndarray, np.ndarray]:
    ref = np.asarray(ref, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if ref.shape != test.shape or ref.ndim != 3 or ref.shape[-1] != 3:
        raise ValidationError(
            f"expected two (H, W, 3) images of equal shape, got {ref.shape} and {test.shape}"
        )
    if not (np.isfinite(ref).all() and np.isfinite(test).all()):
        raise ValidationError("images must be finite")
    if box is not None:
        x0, y0, x1, y1 = (int(v) for v in box)
        h, w = ref.shape[:2]
        if not (0 <= x0 < x1 <= w and 0 <= y0 < y1 <= h):
            raise ValidationError(f"box {box} outside {h}x{w} image")
        ref = ref[y0:y1, x0:x1]
        test = test[y0:y1, x0:x1]
    return ref, test


def psnr(ref: np.ndarray, test: np.ndarray, box=None) -> float:
    """Luma PSNR in dB against a peak of 1.0; +inf for identical inputs."""
    ref, test = _checked_pair(ref, test, box)
    mse = float(np.mean((luma(ref) - luma(test)) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(PEAK**2 / mse)


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    half = (size - 1) / 2
    g = np.exp(-(((np.arange(size) - half) / sigma) ** 2) / 2)
    g /= g.sum()
    return np.outer(g, g)


def ssim(ref: np.ndarray, test: np.ndarray, box=None) -> float:
    """Mean luma SSIM over valid window positions inside the box."""
    ref, test = _checked_pair(ref, test, box)
    x = luma(ref)
    y = luma(test)
    if min(x.shape) < SSIM_WINDOW:
        raise ValidationError(
            f"region {x.shape} is smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} SSIM window"
        )
    win = gaussian_window()
    mu_x = convolve2d(x, win, mode="valid")
    mu_y = convolve2d(y, win, mode="valid")
    xx = convolve2d(x * x, win, mode="valid") - mu_x * mu_x
    yy = convolve2d(y * y, win, mode="valid") - mu_y * mu_y
    xy = convolve2d(x * y, win, mode="valid") - mu_x * mu_y
    c1 = (K1 * PEAK) ** 2
    c2 = (K2 * PEAK) ** 2
    num = (2 * mu_x * mu_y + c1) * (2 * xy + c2)
    den = (mu_x**2 + mu_y**2 + c1) * (xx + yy + c2)
    return float(np.mean(num / den))


def bicubic_baseline(lq: np.ndarray, scale: int) -> np.ndarray:
    """Bicubic x scale upscale of a [0, 1] channel-last frame, clamped.

    Shares the model's resampler and keeps the input's float precision,
    so a network that adds nothing scores identically to this baseline.
    """
    lq = np.asarray(lq)
    if lq.dtype not in (np.float32, np.float64):
        lq = lq.astype(np.float64)
    if lq.ndim != 3 or lq.shape[-1] != 3:
        raise ValidationError(f"expected (h, w, 3), got {lq.shape}")
    x = torch.from_numpy(np.ascontiguousarray(np.moveaxis(lq, -1, 0)))
    up = bicubic_upscale(x, scale).clamp_(0.0, 1.0)
    return np.moveaxis(up.numpy(), 0, -1)
