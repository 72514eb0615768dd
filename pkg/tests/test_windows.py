import numpy as np
import pytest
import torch

from softvid.au import AU_DIM
from softvid.emotions import NUM_STATES
from softvid.errors import ValidationError
from softvid.windows import ClipWindows, WindowDataset, collate, to_unit


def make_clip(clip_id="c0", t=6, n=1, emotion=3, seed=0):
    rng = np.random.default_rng(seed)
    hq = rng.integers(0, 256, (t, 16, 24, 3), dtype=np.uint8)
    lq = rng.integers(0, 256, (t, 4, 6, 3), dtype=np.uint8)
    audio = rng.uniform(-0.5, 0.5, 16000 * 2)
    au = rng.uniform(0, 5, (t, AU_DIM))
    boxes = np.tile([2, 2, 20, 14], (t, 1))
    return ClipWindows(clip_id, lq, hq, audio, 16000, 25.0, emotion, au, boxes, n)


def test_to_unit_layout_and_range():
    frames = np.zeros((2, 4, 6, 3), dtype=np.uint8)
    frames[0, 1, 2, 0] = 255
    u = to_unit(frames)
    assert u.shape == (2, 3, 4, 6)
    assert u.dtype == np.float32
    assert u[0, 0, 1, 2] == 1.0
    assert u.min() == 0.0


def test_edge_replication():
    clip = make_clip(t=5, n=2)
    np.testing.assert_array_equal(clip.window_indices(0), [0, 0, 0, 1, 2])
    np.testing.assert_array_equal(clip.window_indices(2), [0, 1, 2, 3, 4])
    np.testing.assert_array_equal(clip.window_indices(4), [2, 3, 4, 4, 4])


def test_sample_contents():
    clip = make_clip(t=6, n=1, emotion=5)
    s = clip[3]
    assert s.lq.shape == (3, 3, 4, 6)
    assert s.hq.shape == (3, 16, 24)
    assert s.mfcc.shape == (3, 13)
    assert s.emotion.shape == (NUM_STATES,)
    assert s.emotion[5] == 1.0 and s.emotion.sum() == 1.0
    assert s.au.shape == (AU_DIM,)
    np.testing.assert_array_equal(s.box, [2, 2, 20, 14])
    np.testing.assert_array_equal(s.lq[1], clip.lq[3])
    np.testing.assert_array_equal(s.hq, clip.hq[3])
    np.testing.assert_array_equal(s.mfcc, clip.mfcc[[2, 3, 4]])


def test_mismatched_streams_rejected():
    rng = np.random.default_rng(1)
    hq = rng.integers(0, 256, (4, 16, 24, 3), dtype=np.uint8)
    lq = rng.integers(0, 256, (3, 4, 6, 3), dtype=np.uint8)
    audio = np.zeros(16000)
    au = np.zeros((4, AU_DIM))
    boxes = np.tile([0, 0, 24, 16], (4, 1))
    with pytest.raises(ValidationError):
        ClipWindows("bad", lq, hq, audio, 16000, 25.0, 0, au, boxes, 1)
    with pytest.raises(ValidationError):
        ClipWindows("bad", hq[:4, :4, :6], hq, audio, 16000, 25.0, 0, np.zeros((3, AU_DIM)), boxes, 1)


def test_dataset_flat_index():
    clips = [make_clip("a", t=4, seed=0), make_clip("b", t=6, seed=1)]
    ds = WindowDataset(clips)
    assert len(ds) == 10
    assert ds[0].clip_id == "a" and ds[0].frame_index == 0
    assert ds[3].clip_id == "a" and ds[3].frame_index == 3
    assert ds[4].clip_id == "b" and ds[4].frame_index == 0
    assert ds[9].clip_id == "b" and ds[9].frame_index == 5
    with pytest.raises(IndexError):
        ds[10]


def test_collate_batches_tensors():
    clip = make_clip(t=6, n=1)
    batch = collate([clip[1], clip[2], clip[4]])
    assert batch["lq"].shape == (3, 3, 3, 4, 6)
    assert batch["hq"].shape == (3, 3, 16, 24)
    assert batch["mfcc"].shape == (3, 3, 13)
    assert batch["emotion"].shape == (3, NUM_STATES)
    assert batch["au"].shape == (3, AU_DIM)
    assert batch["box"].shape == (3, 4)
    for key in ("lq", "hq", "mfcc", "emotion", "au"):
        assert batch[key].dtype == torch.float32
    assert batch["box"].dtype == torch.int64
    assert batch["ids"] == ["c0:1", "c0:2", "c0:4"]
