import pytest
import torch

from conftest import micro_config
from softvid.audio_branch import AudioBranch, AudioEncoder, MapLifter, tie_directions
from softvid.errors import ValidationError


def test_encoder_output_width_is_twice_hidden():
    enc = AudioEncoder()
    out = enc(torch.randn(3, 5, 13))
    assert out.shape == (3, 256)
    assert enc.out_dim == 256


def test_encoder_rejects_wrong_coefficient_count():
    enc = AudioEncoder()
    with pytest.raises(ValidationError, match="coefficients"):
        enc(torch.randn(3, 5, 12))


def test_directions_read_the_sequence_in_opposite_orders():
    # with both directions tied, encoding a reversed sequence must swap
    # the forward and backward halves of the output
    torch.manual_seed(0)
    enc = AudioEncoder(mfcc_dim=13, hidden=8, layers=3).double()
    tie_directions(enc)
    x = torch.randn(2, 5, 13, dtype=torch.float64)
    fwd = enc(x)
    rev = enc(x.flip(1))
    swapped = torch.cat([fwd[:, 8:], fwd[:, :8]], dim=1)
    assert torch.allclose(rev, swapped, atol=1e-10)


def test_grid_reshape_is_channel_major():
    lifter = MapLifter(in_dim=4, base_channels=3, base_grid=(2, 5), up_channels=(4,))
    flat = torch.arange(30, dtype=torch.float32).unsqueeze(0)
    grid = lifter.to_grid(flat)
    assert grid.shape == (1, 3, 2, 5)
    for c in range(3):
        for i in range(2):
            for j in range(5):
                assert grid[0, c, i, j] == c * 10 + i * 5 + j


def test_grid_reshape_rejects_wrong_length():
    lifter = MapLifter(in_dim=4, base_channels=3, base_grid=(2, 5), up_channels=(4,))
    with pytest.raises(ValidationError, match="values"):
        lifter.to_grid(torch.zeros(1, 29))


def test_each_upsampling_stage_doubles_the_grid():
    lifter = MapLifter(in_dim=6, base_channels=2, base_grid=(3, 4), up_channels=(4, 8))
    out = lifter(torch.randn(2, 6))
    assert out.shape == (2, 8, 12, 16)


def test_branch_output_matches_video_grid(mini_cfg):
    torch.manual_seed(1)
    branch = AudioBranch(mini_cfg)
    out = branch(torch.randn(2, mini_cfg.window_len, 13))
    assert out.modality == "audio"
    assert out.data.shape == (2, mini_cfg.video_channels, mini_cfg.lq_height, mini_cfg.lq_width)


def test_branch_rejects_wrong_window(mini_cfg):
    branch = AudioBranch(mini_cfg)
    with pytest.raises(ValidationError, match="rows"):
        branch(torch.randn(2, mini_cfg.window_len + 1, 13))


def test_lift_gradcheck():
    torch.manual_seed(2)
    lifter = MapLifter(in_dim=5, base_channels=2, base_grid=(2, 3), up_channels=(4,)).double()
    v = torch.randn(1, 5, dtype=torch.float64, requires_grad=True)
    assert torch.autograd.gradcheck(lifter, (v,), eps=1e-6, atol=1e-5)


def test_full_branch_is_deterministic(mini_cfg):
    torch.manual_seed(3)
    branch = AudioBranch(mini_cfg)
    x = torch.randn(1, mini_cfg.window_len, 13)
    assert torch.equal(branch(x).data, branch(x).data)
