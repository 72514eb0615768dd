"""H.264 encode/decode round trips via an external ffmpeg binary.

Compression artifacts come from a real codec, not a simulation: frames are
piped to ffmpeg as raw RGB, encoded with libx264 at a caller-chosen CRF,
and decoded back.  When no usable encoder is present the functions here
raise MissingEncoderError with install guidance instead of silently
substituting something easier.
"""

from __future__ import annotations

import shutil
import subprocess
import tempfile
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import MissingEncoderError, ValidationError

CRF_VALUES = (15, 32, 40)

_REMEDY = (
    "install ffmpeg with libx264 (e.g. `apt-get install ffmpeg` or "
    "a static build from ffmpeg.org) and ensure it is on PATH"
)


def ffmpeg_path() -> str | None:
    """Path to the ffmpeg binary, or None if not installed."""
    return shutil.which("ffmpeg")


@lru_cache(maxsize=1)
def encoder_available() -> bool:
    """True when ffmpeg exists and lists the libx264 encoder."""
    path = ffmpeg_path()
    if path is None:
        return False
    try:
        out = subprocess.run(
            [path, "-hide_banner", "-encoders"],
            capture_output=True,
            text=True,
            timeout=30,
        )
    except (OSError, subprocess.TimeoutExpired):
        return False
    return out.returncode == 0 and "libx264" in out.stdout


def require_encoder() -> str:
    path = ffmpeg_path()
    if path is None:
        raise MissingEncoderError(f"ffmpeg not found on PATH; {_REMEDY}")
    if not encoder_available():
        raise MissingEncoderError(f"{path} lacks the libx264 encoder; {_REMEDY}")
    return path


def encode_decode(frames: np.ndarray, fps: float, crf: int) -> np.ndarray:
    """Round-trip frames through libx264 at the given CRF.

    Args:
        frames: uint8 RGB video, shape (T, H, W, 3).
        fps: frame rate written into the container.
        crf: x264 constant rate factor; larger means more damage.

    Returns:
        Decoded uint8 frames with the same shape as the input.
    """
    frames = np.asarray(frames)
    if frames.dtype != np.uint8 or frames.ndim != 4 or frames.shape[-1] != 3:
        raise ValidationError(
            f"expected uint8 (T, H, W, 3) frames, got {frames.dtype} {frames.shape}"
        )
    if not 0 <= crf <= 51:
        raise ValidationError(f"crf must be in [0, 51], got {crf}")
    ffmpeg = require_encoder()
    t, h, w, _ = frames.shape

    with tempfile.TemporaryDirectory(prefix="softvid_codec_") as tmp:
        encoded = Path(tmp) / "clip.mp4"
        enc = subprocess.run(
            [
                ffmpeg, "-hide_banner", "-loglevel", "error", "-y",
                "-f", "rawvideo", "-pix_fmt", "rgb24",
                "-s", f"{w}x{h}", "-r", f"{fps}", "-i", "pipe:0",
                "-c:v", "libx264", "-crf", str(crf),
                "-pix_fmt", "yuv420p", str(encoded),
            ],
            input=frames.tobytes(),
            capture_output=True,
        )
        if enc.returncode != 0:
            raise MissingEncoderError(
                f"ffmpeg encode failed: {enc.stderr.decode(errors='replace').strip()}"
            )
        dec = subprocess.run(
            [
                ffmpeg, "-hide_banner", "-loglevel", "error",
                "-i", str(encoded),
                "-f", "rawvideo", "-pix_fmt", "rgb24", "pipe:1",
            ],
            capture_output=True,
        )
    if dec.returncode != 0:
        raise MissingEncoderError(
            f"ffmpeg decode failed: {dec.stderr.decode(errors='replace').strip()}"
        )
    out = np.frombuffer(dec.stdout, dtype=np.uint8)
    if out.size != frames.size:
        raise MissingEncoderError(
            f"decoded {out.size} bytes, expected {frames.size}; "
            "ffmpeg produced a truncated stream"
        )
    return out.reshape(t, h, w, 3).copy()
