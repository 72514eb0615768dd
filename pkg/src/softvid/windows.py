"""Training samples: sliding windows over aligned clip streams.

Every frame of a clip yields one sample: the 2N+1 surrounding low-quality
frames, the matching MFCC rows, the emotion one-hot, the center frame's
action-unit targets and face box, and the high-quality center frame as
ground truth.  Neighbor indices past either end of the clip are clamped,
so edge frames see their nearest real neighbors repeated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from .au import AU_DIM
from .emotions import NUM_STATES, decode_emotion
from .errors import ValidationError
from .mfcc import extract_mfcc


def to_unit(frames: np.ndarray) -> np.ndarray:
    """uint8 (..., H, W, 3) frames to float32 (..., 3, H, W) in [0, 1]."""
    return np.moveaxis(frames.astype(np.float32) / 255.0, -1, -3)


@dataclass
class SampleWindow:
    """One training or evaluation sample centered on a single frame."""

    clip_id: str
    frame_index: int
    lq: np.ndarray        # (2N+1, 3, h, w) float32 in [0, 1]
    hq: np.ndarray        # (3, H, W) float32 in [0, 1]
    mfcc: np.ndarray      # (2N+1, n_coeffs) float32
    emotion: np.ndarray   # (NUM_STATES,) float32 one-hot
    au: np.ndarray        # (AU_DIM,) float32
    box: np.ndarray       # (4,) int64, center-frame face box on the HQ grid


class ClipWindows:
    """All windows of one clip, materialized lazily by index.

    Args:
        clip_id: identifier carried into each sample.
        lq_frames: uint8 (T, h, w, 3) degraded video.
        hq_frames: uint8 (T, H, W, 3) ground-truth video.
        audio: mono float waveform covering the clip.
        rate: audio sample rate.
        fps: video frame rate.
        emotion_index: state index in [0, NUM_STATES).
        au: (T, AU_DIM) action-unit intensities.
        boxes: (T, 4) face boxes on the HQ grid.
        n: neighbors on each side of the center frame.
        mfcc: precomputed (T, n_coeffs) rows; extracted from audio if None.
    """

    def __init__(
        self,
        clip_id: str,
        lq_frames: np.ndarray,
        hq_frames: np.ndarray,
        audio: np.ndarray,
        rate: int,
        fps: float,
        emotion_index: int,
        au: np.ndarray,
        boxes: np.ndarray,
        n: int,
        mfcc: np.ndarray | None = None,
    ):
        t = len(hq_frames)
        if len(lq_frames) != t:
            raise ValidationError(
                f"{clip_id}: {len(lq_frames)} degraded frames for {t} source frames"
            )
        if au.shape != (t, AU_DIM):
            raise ValidationError(f"{clip_id}: expected {(t, AU_DIM)} AU rows, got {au.shape}")
        decode_emotion(emotion_index)
        self.clip_id = clip_id
        self.n = n
        self.lq = to_unit(lq_frames)
        self.hq = to_unit(hq_frames)
        if mfcc is None:
            mfcc = extract_mfcc(audio, rate, fps, t)
        self.mfcc = mfcc.astype(np.float32)
        self.emotion = np.zeros(NUM_STATES, dtype=np.float32)
        self.emotion[emotion_index] = 1.0
        self.emotion_index = emotion_index
        self.au = au.astype(np.float32)
        self.boxes = boxes.astype(np.int64)

    def __len__(self) -> int:
        return len(self.hq)

    def window_indices(self, k: int) -> np.ndarray:
        t = len(self.hq)
        return np.clip(np.arange(k - self.n, k + self.n + 1), 0, t - 1)

    def __getitem__(self, k: int) -> SampleWindow:
        idx = self.window_indices(k)
        return SampleWindow(
            clip_id=self.clip_id,
            frame_index=k,
            lq=self.lq[idx],
            hq=self.hq[k],
            mfcc=self.mfcc[idx],
            emotion=self.emotion,
            au=self.au[k],
            box=self.boxes[k],
        )


def inference_windows(
    clip_id: str,
    lq_frames: np.ndarray,
    audio: np.ndarray,
    rate: int,
    fps: float,
    emotion_index: int,
    n: int,
) -> ClipWindows:
    """Windows for restoration when no ground truth exists.

    Target-side streams (high-quality frames, action units, face boxes)
    are placeholders; only the degraded frames, audio, and emotion state
    feed the network.
    """
    t = len(lq_frames)
    return ClipWindows(
        clip_id,
        lq_frames,
        np.zeros((t, 1, 1, 3), dtype=np.uint8),
        audio,
        rate,
        fps,
        emotion_index,
        np.zeros((t, AU_DIM), dtype=np.float32),
        np.zeros((t, 4), dtype=np.int64),
        n,
    )


class WindowDataset:
    """Flat index over the windows of several clips."""

    def __init__(self, clips: list[ClipWindows]):
        if not clips:
            raise ValidationError("dataset needs at least one clip")
        self.clips = clips
        self._offsets = np.cumsum([0] + [len(c) for c in clips])

    def __len__(self) -> int:
        return int(self._offsets[-1])

    def __getitem__(self, i: int) -> SampleWindow:
        if not 0 <= i < len(self):
            raise IndexError(i)
        c = int(np.searchsorted(self._offsets, i, side="right")) - 1
        return self.clips[c][i - int(self._offsets[c])]


def collate(samples: list[SampleWindow]) -> dict:
    """Stack samples into a training batch of torch tensors.

    The "ids" entry keeps human-readable sample identities for
    diagnostics when a batch misbehaves.
    """
    return {
        "ids": [f"{s.clip_id}:{s.frame_index}" for s in samples],
        "lq": torch.from_numpy(np.stack([s.lq for s in samples])),
        "hq": torch.from_numpy(np.stack([s.hq for s in samples])),
        "mfcc": torch.from_numpy(np.stack([s.mfcc for s in samples])),
        "emotion": torch.from_numpy(np.stack([s.emotion for s in samples])),
        "au": torch.from_numpy(np.stack([s.au for s in samples])),
        "box": torch.from_numpy(np.stack([s.box for s in samples])),
    }
