import math

import numpy as np
import pytest
import torch

from softvid.bicubic import bicubic_upscale
from softvid.errors import ValidationError
from softvid.metrics import bicubic_baseline, gaussian_window, luma, psnr, ssim


def test_luma_weights():
    img = np.zeros((2, 2, 3))
    img[..., 0] = 1.0
    assert luma(img)[0, 0] == pytest.approx(0.299)
    img = np.ones((2, 2, 3))
    np.testing.assert_allclose(luma(img), 1.0, atol=1e-12)


def test_psnr_analytic_quarter_mse():
    # gray 0.5 vs black: luma error 0.5 everywhere, MSE 0.25,
    # 10 log10(1 / 0.25) = 6.0206 dB
    ref = np.zeros((16, 16, 3))
    test = np.full((16, 16, 3), 0.5)
    assert psnr(ref, test) == pytest.approx(10 * math.log10(4), abs=1e-10)
    assert psnr(ref, test) == pytest.approx(6.0206, abs=1e-4)


def test_psnr_identity_is_infinite():
    img = np.random.default_rng(0).random((8, 8, 3))
    assert psnr(img, img) == math.inf


def test_psnr_box_restricts_the_comparison():
    rng = np.random.default_rng(1)
    ref = rng.random((20, 30, 3))
    test = ref.copy()
    test[:5, :, :] = 0.0  # damage outside the box only
    assert psnr(ref, test, box=(0, 5, 30, 20)) == math.inf
    assert psnr(ref, test) < math.inf


def test_gaussian_window_normalized():
    win = gaussian_window()
    assert win.shape == (11, 11)
    assert win.sum() == pytest.approx(1.0, abs=1e-12)
    assert win[5, 5] == win.max()
    np.testing.assert_allclose(win, win.T, atol=1e-15)


def test_ssim_identity_is_exactly_one():
    img = np.random.default_rng(2).random((24, 24, 3))
    assert ssim(img, img) == 1.0


def test_ssim_decreases_with_noise():
    rng = np.random.default_rng(3)
    ref = np.clip(rng.random((32, 32, 3)), 0, 1)
    light = np.clip(ref + rng.normal(0, 0.02, ref.shape), 0, 1)
    heavy = np.clip(ref + rng.normal(0, 0.2, ref.shape), 0, 1)
    s_light, s_heavy = ssim(ref, light), ssim(ref, heavy)
    assert 0 < s_heavy < s_light < 1


def test_ssim_region_too_small():
    img = np.random.default_rng(4).random((32, 32, 3))
    with pytest.raises(ValidationError):
        ssim(img, img, box=(0, 0, 10, 32))


def test_box_bounds_checked():
    img = np.zeros((10, 10, 3))
    for box in [(-1, 0, 5, 5), (0, 0, 11, 5), (5, 5, 5, 9)]:
        with pytest.raises(ValidationError):
            psnr(img, img, box=box)


def test_shape_mismatch_rejected():
    with pytest.raises(ValidationError):
        psnr(np.zeros((4, 4, 3)), np.zeros((5, 4, 3)))


def test_non_finite_rejected():
    bad = np.zeros((12, 12, 3))
    bad[0, 0, 0] = np.nan
    with pytest.raises(ValidationError):
        psnr(bad, np.zeros((12, 12, 3)))


def test_baseline_is_clamped_shared_bicubic():
    rng = np.random.default_rng(5)
    lq = rng.random((6, 8, 3))
    base = bicubic_baseline(lq, 4)
    direct = bicubic_upscale(torch.from_numpy(np.moveaxis(lq, -1, 0)), 4)
    direct = np.moveaxis(direct.clamp(0, 1).numpy(), 0, -1)
    np.testing.assert_array_equal(base, direct)
    assert base.min() >= 0.0 and base.max() <= 1.0
