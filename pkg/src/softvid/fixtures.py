"""Synthetic talking-head fixtures for tests and desk-scale runs.

Each generated clip is a drifting ellipse face over a gradient background
whose mouth opens with the loudness of a synthesized tone, so the audio
track genuinely predicts mouth shape.  Everything derives from a single
integer seed: writing the same fixture twice produces byte-identical
files.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .au import AU_COLUMNS, write_au_file
from .clips import save_video, save_wav, write_face_boxes
from .emotions import NUM_STATES
from .manifest import ClipRecord, write_manifest

AUDIO_RATE = 16000


def synth_audio(rng: np.random.Generator, n_frames: int, fps: float) -> tuple[np.ndarray, np.ndarray]:
    """A tone with a slow loudness envelope, plus that envelope per frame.

    Returns (waveform, envelope) where envelope[k] in [0, 1] is the mean
    amplitude during frame k.
    """
    n_samples = int(math.ceil(n_frames / fps * AUDIO_RATE)) + AUDIO_RATE // 10
    t = np.arange(n_samples) / AUDIO_RATE
    tone_hz = float(rng.uniform(110.0, 440.0))
    env_hz = float(rng.uniform(0.5, 2.0))
    phase = float(rng.uniform(0, 2 * np.pi))
    envelope = 0.5 * (1.0 + np.sin(2 * np.pi * env_hz * t + phase))
    wave = 0.8 * envelope * np.sin(2 * np.pi * tone_hz * t)
    per_frame = np.empty(n_frames)
    for k in range(n_frames):
        lo = int(k / fps * AUDIO_RATE)
        hi = int((k + 1) / fps * AUDIO_RATE)
        per_frame[k] = envelope[lo:hi].mean()
    return wave, per_frame


def _ellipse(xx, yy, cx, cy, rx, ry):
    return ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 <= 1.0


def render_clip(
    rng: np.random.Generator,
    n_frames: int,
    height: int,
    width: int,
    envelope: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw the face animation. Returns (frames, face_boxes)."""
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    top = rng.uniform(40, 120, size=3)
    bottom = rng.uniform(40, 120, size=3)
    skin = rng.uniform((150, 100, 80), (230, 180, 150))
    mouth_color = np.array([120.0, 30.0, 40.0])
    eye_color = np.array([25.0, 25.0, 30.0])
    drift = float(rng.uniform(0, 2 * np.pi))
    rx, ry = 0.24 * width, 0.34 * height

    background = (
        top[None, None, :]
        + (bottom - top)[None, None, :] * (yy / max(height - 1, 1))[:, :, None]
    )
    frames = np.empty((n_frames, height, width, 3), dtype=np.uint8)
    boxes = np.empty((n_frames, 4), dtype=np.int64)
    for k in range(n_frames):
        cx = width / 2 + 0.06 * width * math.sin(2 * np.pi * k / n_frames + drift)
        cy = height / 2 + 0.04 * height * math.cos(2 * np.pi * k / n_frames + drift)
        img = background.copy()
        face = _ellipse(xx, yy, cx, cy, rx, ry)
        img[face] = skin
        for side in (-1, 1):
            eye = _ellipse(xx, yy, cx + side * 0.38 * rx, cy - 0.30 * ry, 0.16 * rx, 0.10 * ry)
            img[eye & face] = eye_color
        mouth_ry = (0.06 + 0.30 * envelope[k]) * ry
        mouth = _ellipse(xx, yy, cx, cy + 0.45 * ry, 0.42 * rx, mouth_ry)
        img[mouth & face] = mouth_color
        img += rng.normal(0.0, 2.0, size=img.shape)
        frames[k] = np.clip(np.rint(img), 0, 255).astype(np.uint8)
        boxes[k] = [
            max(int(math.floor(cx - rx)), 0),
            max(int(math.floor(cy - ry)), 0),
            min(int(math.ceil(cx + rx)), width),
            min(int(math.ceil(cy + ry)), height),
        ]
    return frames, boxes


def synth_au(rng: np.random.Generator, n_frames: int, envelope: np.ndarray) -> np.ndarray:
    """Per-frame action-unit intensities in [0, 5].

    Mouth units follow the audio envelope; the rest are slow sinusoids
    with random phase and amplitude.
    """
    k = np.arange(n_frames)
    au = np.empty((n_frames, len(AU_COLUMNS)))
    for j, name in enumerate(AU_COLUMNS):
        if name in ("AU25_r", "AU26_r"):
            au[:, j] = 5.0 * envelope[:n_frames]
        else:
            amp = rng.uniform(0.5, 2.5)
            phase = rng.uniform(0, 2 * np.pi)
            cycles = rng.uniform(0.5, 2.0)
            au[:, j] = amp * (1 + np.sin(2 * np.pi * cycles * k / n_frames + phase))
    return np.clip(au, 0.0, 5.0)


def assign_split(clip_idx: int, n_clips: int) -> str:
    if n_clips >= 3 and clip_idx == n_clips - 1:
        return "test"
    if n_clips >= 3 and clip_idx == n_clips - 2:
        return "val"
    return "train"


def make_fixture(
    root: str | Path,
    n_clips: int = 4,
    n_frames: int = 24,
    hq_height: int = 64,
    hq_width: int = 96,
    fps: float = 25.0,
    seed: int = 0,
) -> Path:
    """Generate a dataset directory and return the manifest path."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    records = []
    for i in range(n_clips):
        rng = np.random.default_rng([seed, i])
        clip_id = f"clip_{i:03d}"
        wave, envelope = synth_audio(rng, n_frames, fps)
        frames, boxes = render_clip(rng, n_frames, hq_height, hq_width, envelope)
        au = synth_au(rng, n_frames, envelope)
        save_video(root / f"{clip_id}.hq.npy", frames)
        save_wav(root / f"{clip_id}.wav", wave, AUDIO_RATE)
        write_au_file(root / f"{clip_id}.au.csv", au)
        write_face_boxes(root / f"{clip_id}.boxes.csv", boxes)
        records.append(
            ClipRecord(
                clip_id=clip_id,
                hq_video=f"{clip_id}.hq.npy",
                audio=f"{clip_id}.wav",
                au_file=f"{clip_id}.au.csv",
                face_boxes=f"{clip_id}.boxes.csv",
                emotion_index=i % NUM_STATES,
                fps=fps,
                split=assign_split(i, n_clips),
            )
        )
    manifest = root / "manifest.jsonl"
    write_manifest(manifest, records)
    return manifest
