import numpy as np
import pytest
import torch

from softvid.config import ModelConfig
from softvid.fixtures import make_fixture
from softvid.manifest import load_split, read_manifest
from softvid.prepare import prepare_dataset
from softvid.windows import WindowDataset


@pytest.fixture(scope="session")
def mini_cfg():
    return ModelConfig.miniature()


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory):
    """A small prepared dataset shared by training and eval tests."""
    root = tmp_path_factory.mktemp("data")
    manifest = make_fixture(root, n_clips=3, n_frames=8)
    result = prepare_dataset(manifest, scale=4, codec="none")
    assert result.ok, result.failures
    return root


@pytest.fixture(scope="session")
def train_dataset(dataset_dir):
    records = read_manifest(dataset_dir / "manifest.jsonl")
    clips = load_split(dataset_dir, records, "train", 1, "down")
    return WindowDataset(clips)


def model_inputs(cfg: ModelConfig, batch: int = 2, seed: int = 0):
    """Random (lq, mfcc, emotion) tensors matching a config's shapes."""
    g = torch.Generator().manual_seed(seed)
    lq = torch.rand(batch, cfg.window_len, 3, cfg.lq_height, cfg.lq_width, generator=g)
    mfcc = torch.randn(batch, cfg.window_len, cfg.mfcc_dim, generator=g)
    emotion = torch.zeros(batch, cfg.emotion_states)
    emotion[torch.arange(batch), torch.arange(batch) % cfg.emotion_states] = 1.0
    return lq, mfcc, emotion


def micro_config(**overrides) -> ModelConfig:
    """The smallest topology gradient checks can afford.

    Not validated against the audio-lift divisibility rule on purpose;
    individual stage tests use only the pieces that fit.
    """
    base = dict(
        lq_height=8,
        lq_width=8,
        scale=2,
        window_half=1,
        video_channels=4,
        video_blocks=1,
        audio_hidden=4,
        audio_up_channels=(4, 4, 4),
        au_hidden=(4, 4),
        au_dropout=0.5,
        gate_hidden=(4,),
        embed_channels=2,
        recon_blocks=1,
        disc_channels=(4, 8),
    )
    base.update(overrides)
    return ModelConfig(**base)
