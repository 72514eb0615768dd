import math
from pathlib import Path

import numpy as np
import pytest
import torch

from softvid.bicubic import bicubic_upscale
from softvid.errors import ValidationError


def kernel(x, a=-0.5):
    x = abs(x)
    if x <= 1:
        return (a + 2) * x**3 - (a + 3) * x**2 + 1
    if x < 2:
        return a * x**3 - 5 * a * x**2 + 8 * a * x - 4 * a
    return 0.0


def oracle_upscale(img, s):
    """Direct per-pixel evaluation of the resampling formula."""
    h, w = img.shape
    out = np.zeros((h * s, w * s))
    for oy in range(h * s):
        for ox in range(w * s):
            uy = (oy + 0.5) / s - 0.5
            ux = (ox + 0.5) / s - 0.5
            by, bx = math.floor(uy), math.floor(ux)
            acc = 0.0
            for dy in range(-1, 3):
                for dx in range(-1, 3):
                    sy = min(max(by + dy, 0), h - 1)
                    sx = min(max(bx + dx, 0), w - 1)
                    acc += kernel(uy - (by + dy)) * kernel(ux - (bx + dx)) * img[sy, sx]
            out[oy, ox] = acc
    return out


@pytest.mark.parametrize("scale", [2, 4])
def test_matches_pointwise_oracle(scale):
    rng = np.random.default_rng(3)
    img = rng.random((6, 7))
    got = bicubic_upscale(torch.from_numpy(img), scale).numpy()
    np.testing.assert_allclose(got, oracle_upscale(img, scale), atol=1e-12)


def test_constant_image_stays_constant():
    x = torch.full((5, 9), 0.37, dtype=torch.float64)
    up = bicubic_upscale(x, 4)
    assert up.shape == (20, 36)
    np.testing.assert_allclose(up.numpy(), 0.37, atol=1e-12)


def test_batched_channels_match_loop():
    rng = np.random.default_rng(11)
    imgs = rng.random((2, 3, 5, 6))
    up = bicubic_upscale(torch.from_numpy(imgs), 2).numpy()
    for b in range(2):
        for c in range(3):
            np.testing.assert_allclose(up[b, c], oracle_upscale(imgs[b, c], 2), atol=1e-12)


def test_scale_one_is_identity():
    x = torch.rand(4, 5)
    assert bicubic_upscale(x, 1) is x


def test_gradient_flows():
    x = torch.rand(1, 3, 4, 4, requires_grad=True)
    bicubic_upscale(x, 4).sum().backward()
    assert x.grad is not None
    assert torch.isfinite(x.grad).all()
    assert x.grad.abs().sum() > 0


def test_bad_scale_rejected():
    with pytest.raises(ValidationError):
        bicubic_upscale(torch.rand(4, 4), 0)
    with pytest.raises(ValidationError):
        bicubic_upscale(torch.rand(4), 2)


def test_linear_ramp_reproduced_away_from_borders():
    yy, xx = np.mgrid[0:6, 0:8].astype(np.float64)
    ramp = 0.05 * yy + 0.03 * xx + 0.2
    up = bicubic_upscale(torch.from_numpy(ramp), 4).numpy()
    oy, ox = np.mgrid[0:24, 0:32].astype(np.float64)
    want = 0.05 * ((oy + 0.5) / 4 - 0.5) + 0.03 * ((ox + 0.5) / 4 - 0.5) + 0.2
    np.testing.assert_allclose(up[8:-8, 8:-8], want[8:-8, 8:-8], atol=1e-6)


def test_checkerboard_matches_stored_reference():
    ref = np.load(Path(__file__).parent / "data" / "checkerboard_ref.npy")
    yy, xx = np.mgrid[0:8, 0:12]
    board = np.stack([((yy + xx + c) % 2).astype(np.float64) for c in range(3)])
    up = bicubic_upscale(torch.from_numpy(board), 4).numpy()
    np.testing.assert_allclose(up, ref, atol=1e-12)
