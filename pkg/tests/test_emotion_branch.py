import pytest
import torch

from conftest import micro_config
from softvid.emotion_branch import AuPredictor, ChannelGate, au_loss
from softvid.errors import ValidationError
from softvid.features import FeatureMaps


def onehot(idx, batch=1, states=15):
    e = torch.zeros(batch, states)
    e[:, idx] = 1.0
    return e


def video_maps(cfg, batch=2, seed=0):
    g = torch.Generator().manual_seed(seed)
    t = torch.randn(batch, cfg.video_channels, cfg.lq_height, cfg.lq_width, generator=g)
    return FeatureMaps(t, "video")


def test_predictor_output_width(mini_cfg):
    torch.manual_seed(0)
    pred = AuPredictor(mini_cfg)
    out = pred(video_maps(mini_cfg), onehot(3, batch=2))
    assert out.shape == (2, mini_cfg.au_dim)


def test_predictor_rejects_audio_maps(mini_cfg):
    pred = AuPredictor(mini_cfg)
    maps = FeatureMaps(torch.randn(1, mini_cfg.video_channels, 4, 4), "audio")
    with pytest.raises(ValidationError, match="expected video"):
        pred(maps, onehot(0))


def test_predictor_rejects_bad_onehot_shape(mini_cfg):
    pred = AuPredictor(mini_cfg)
    with pytest.raises(ValidationError, match="one-hot"):
        pred(video_maps(mini_cfg, batch=1), torch.zeros(1, 14))


def test_dropout_active_only_in_train_mode(mini_cfg):
    torch.manual_seed(1)
    pred = AuPredictor(mini_cfg)
    maps, e = video_maps(mini_cfg, batch=1), onehot(2)
    pred.train()
    torch.manual_seed(2)
    a = pred(maps, e)
    b = pred(maps, e)
    assert not torch.equal(a, b)
    pred.eval()
    assert torch.equal(pred(maps, e), pred(maps, e))


def test_prediction_depends_on_emotion_state(mini_cfg):
    torch.manual_seed(3)
    pred = AuPredictor(mini_cfg).eval()
    maps = video_maps(mini_cfg, batch=1)
    assert not torch.allclose(pred(maps, onehot(0)), pred(maps, onehot(7)))


def test_gate_shape_and_open_range(mini_cfg):
    torch.manual_seed(4)
    gate = ChannelGate(mini_cfg)
    out = gate(torch.randn(3, mini_cfg.au_dim))
    assert out.data.shape == (3, mini_cfg.video_channels)
    assert out.data.min() > 0 and out.data.max() < 1


def test_gate_gradcheck():
    torch.manual_seed(5)
    gate = ChannelGate(micro_config()).double()
    au = torch.randn(1, 17, dtype=torch.float64, requires_grad=True)
    assert torch.autograd.gradcheck(lambda a: gate(a).data, (au,), eps=1e-6, atol=1e-5)


def test_au_loss_matches_scalar_oracle():
    g = torch.Generator().manual_seed(6)
    pred = torch.randn(3, 17, generator=g, dtype=torch.float64)
    target = torch.randn(3, 17, generator=g, dtype=torch.float64)
    want = 0.0
    for b in range(3):
        s = 0.0
        for k in range(17):
            s += (float(pred[b, k]) - float(target[b, k])) ** 2
        want += s / 3
    assert abs(float(au_loss(pred, target)) - want) < 1e-12


def test_au_loss_zero_iff_exact():
    x = torch.randn(2, 17, dtype=torch.float64)
    assert float(au_loss(x, x)) == 0.0
    nudged = x.clone()
    nudged[1, 5] += 1e-6
    assert float(au_loss(x, nudged)) > 0.0


def test_au_loss_spot_value():
    pred = torch.ones(1, 17, dtype=torch.float64)
    target = torch.zeros(1, 17, dtype=torch.float64)
    assert float(au_loss(pred, target)) == 17.0


def test_au_loss_unbatched_vector():
    pred = torch.full((17,), 2.0, dtype=torch.float64)
    assert float(au_loss(pred, torch.zeros(17, dtype=torch.float64))) == 68.0


def test_au_loss_shape_mismatch():
    with pytest.raises(ValidationError):
        au_loss(torch.zeros(2, 17), torch.zeros(2, 16))
