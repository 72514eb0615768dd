"""Clip storage and the degradation pipeline.

A clip on disk is a .npy video (T, H, W, 3) uint8, a 16-bit mono WAV, a
face-box CSV with one row per frame, and an action-unit CSV.  Degradation
box-averages the high-quality frames down by the model scale and then
round-trips them through H.264; ``codec="none"`` skips the codec so the
pipeline stays runnable on hosts without an encoder.
"""

from __future__ import annotations

import csv
import wave
from pathlib import Path

import numpy as np

from . import codec as codec_mod
from .errors import FormatError, ValidationError


def save_video(path: str | Path, frames: np.ndarray) -> None:
    frames = np.asarray(frames)
    if frames.dtype != np.uint8 or frames.ndim != 4 or frames.shape[-1] != 3:
        raise ValidationError(
            f"expected uint8 (T, H, W, 3) frames, got {frames.dtype} {frames.shape}"
        )
    np.save(path, frames)


def load_video(path: str | Path) -> np.ndarray:
    """Load a .npy video and validate its layout."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"video file not found: {path}")
    try:
        frames = np.load(path, allow_pickle=False)
    except (ValueError, OSError, EOFError) as exc:
        raise FormatError(f"{path}: not a readable .npy video ({exc})") from exc
    if frames.dtype != np.uint8 or frames.ndim != 4 or frames.shape[-1] != 3:
        raise FormatError(
            f"{path}: expected uint8 (T, H, W, 3), got {frames.dtype} {frames.shape}"
        )
    return frames


def save_wav(path: str | Path, audio: np.ndarray, rate: int) -> None:
    """Write mono float audio in [-1, 1] as 16-bit PCM."""
    audio = np.asarray(audio, dtype=np.float64)
    if audio.ndim != 1:
        raise ValidationError(f"audio must be mono 1-D, got shape {audio.shape}")
    pcm = np.clip(np.rint(audio * 32767.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(rate)
        wf.writeframes(pcm.tobytes())


def load_wav(path: str | Path) -> tuple[np.ndarray, int]:
    """Read a 16-bit mono WAV as float64 in [-1, 1] plus its sample rate."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"audio file not found: {path}")
    with wave.open(str(path), "rb") as wf:
        if wf.getnchannels() != 1 or wf.getsampwidth() != 2:
            raise FormatError(
                f"{path}: expected 16-bit mono WAV, got "
                f"{wf.getnchannels()} channel(s) at {8 * wf.getsampwidth()} bits"
            )
        rate = wf.getframerate()
        pcm = np.frombuffer(wf.readframes(wf.getnframes()), dtype="<i2")
    return pcm.astype(np.float64) / 32767.0, rate


def write_face_boxes(path: str | Path, boxes: np.ndarray) -> None:
    """Write per-frame face boxes as CSV rows frame,x0,y0,x1,y1.

    Boxes are half-open pixel ranges on the high-quality grid: columns
    [x0, x1) and rows [y0, y1).
    """
    boxes = np.asarray(boxes)
    if boxes.ndim != 2 or boxes.shape[1] != 4:
        raise ValidationError(f"boxes must be (T, 4), got {boxes.shape}")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame", "x0", "y0", "x1", "y1"])
        for k, (x0, y0, x1, y1) in enumerate(boxes):
            writer.writerow([k, int(x0), int(y0), int(x1), int(y1)])


def load_face_boxes(path: str | Path, n_frames: int | None = None) -> np.ndarray:
    """Load a face-box CSV, returning int boxes of shape (T, 4)."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"face box file not found: {path}")
    rows: list[tuple[int, int, int, int]] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        missing = [c for c in ("frame", "x0", "y0", "x1", "y1") if c not in fields]
        if missing:
            raise FormatError(f"{path}: missing columns {missing}")
        for rec in reader:
            rows.append((int(rec["x0"]), int(rec["y0"]), int(rec["x1"]), int(rec["y1"])))
    boxes = np.array(rows, dtype=np.int64).reshape(-1, 4)
    if n_frames is not None and len(boxes) != n_frames:
        raise FormatError(f"{path}: {len(boxes)} boxes for {n_frames} frames")
    return boxes


def check_clip(
    frames: np.ndarray,
    fps: float,
    audio: np.ndarray,
    rate: int,
    boxes: np.ndarray,
) -> None:
    """Validate that a clip's streams agree before it enters the pipeline.

    Checks frame count vs audio duration (audio must cover the video),
    box shape, box bounds against the frame size, and non-empty boxes.
    """
    t, h, w = frames.shape[:3]
    if t == 0:
        raise ValidationError("clip has no frames")
    if len(audio) / rate < t / fps - 1e-9:
        raise ValidationError(
            f"audio covers {len(audio) / rate:.3f}s but video is {t / fps:.3f}s"
        )
    if boxes.shape != (t, 4):
        raise ValidationError(f"expected {(t, 4)} face boxes, got {boxes.shape}")
    x0, y0, x1, y1 = boxes[:, 0], boxes[:, 1], boxes[:, 2], boxes[:, 3]
    if (x0 < 0).any() or (y0 < 0).any() or (x1 > w).any() or (y1 > h).any():
        raise ValidationError(f"face boxes fall outside the {h}x{w} frame")
    if (x1 <= x0).any() or (y1 <= y0).any():
        raise ValidationError("face boxes must have positive width and height")


def area_downsample(frames: np.ndarray, scale: int) -> np.ndarray:
    """Box-average frames down by an integer factor.

    Each output pixel is the mean of the corresponding scale x scale block,
    rounded to the nearest uint8.
    """
    frames = np.asarray(frames)
    t, h, w, c = frames.shape
    if h % scale or w % scale:
        raise ValidationError(f"{h}x{w} frames are not divisible by scale {scale}")
    blocks = frames.reshape(t, h // scale, scale, w // scale, scale, c)
    means = blocks.astype(np.float64).mean(axis=(2, 4))
    return np.rint(means).astype(np.uint8)


def degrade_clip(
    frames: np.ndarray,
    scale: int,
    crf: int,
    fps: float,
    codec: str = "x264",
) -> np.ndarray:
    """Produce the low-quality stream: downscale, then compress.

    Args:
        frames: high-quality uint8 (T, H, W, 3) video.
        scale: integer downscale factor.
        crf: x264 constant rate factor (ignored when codec is "none").
        fps: frame rate used by the encoder.
        codec: "x264" for a real encode/decode round trip, "none" to stop
            after downscaling (for hosts without an encoder).
    """
    small = area_downsample(frames, scale)
    if codec == "none":
        return small
    if codec != "x264":
        raise ValidationError(f"unknown codec {codec!r}; expected 'x264' or 'none'")
    return codec_mod.encode_decode(small, fps, crf)
