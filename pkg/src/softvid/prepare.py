"""Dataset preparation: degrade every clip and cache its audio features.

Each clip is degraded once per requested CRF (or once by plain
downscaling when no codec is available) and its MFCC table is computed
and stored next to it.  Preparation is idempotent: outputs that already
exist with the right shape are skipped, so re-running after an
interruption or with an extended CRF list only does new work.  Clips
that fail are reported and skipped rather than aborting the run.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .clips import degrade_clip, load_video, load_wav, save_video
from .errors import SoftvidError, ValidationError
from .manifest import ClipRecord, read_manifest, write_manifest
from .mfcc import extract_mfcc


def degradation_label(crf: int | None, codec: str) -> str:
    return f"crf{crf}" if codec == "x264" else "down"


@dataclass
class PrepareResult:
    degraded: int
    skipped: int
    failures: list[tuple[str, str]]  # (clip_id, reason)

    @property
    def ok(self) -> bool:
        return not self.failures


def _degrade_one(
    root: Path, rec: ClipRecord, scale: int, crfs: list[int], codec: str
) -> tuple[ClipRecord, int, int]:
    hq = load_video(root / rec.hq_video)
    t, h, w, _ = hq.shape
    if h % scale or w % scale:
        raise ValidationError(f"{h}x{w} frames not divisible by scale {scale}")
    done = skipped = 0
    lq_videos = dict(rec.lq_videos)
    expected = (t, h // scale, w // scale, 3)
    for crf in crfs if codec == "x264" else [None]:
        label = degradation_label(crf, codec)
        name = f"{rec.clip_id}.lq.{label}.npy"
        out = root / name
        if out.exists() and load_video(out).shape == expected:
            lq_videos[label] = name
            skipped += 1
            continue
        lq = degrade_clip(hq, scale, crf if crf is not None else 0, rec.fps, codec=codec)
        save_video(out, lq)
        lq_videos[label] = name
        done += 1

    mfcc_name = f"{rec.clip_id}.mfcc.npy"
    mfcc_path = root / mfcc_name
    if not (mfcc_path.exists() and np.load(mfcc_path).shape == (t, 13)):
        audio, rate = load_wav(root / rec.audio)
        np.save(mfcc_path, extract_mfcc(audio, rate, rec.fps, t))
        done += 1
    else:
        skipped += 1
    return replace(rec, lq_videos=lq_videos, mfcc=mfcc_name), done, skipped


def prepare_dataset(
    manifest_path: str | Path,
    scale: int,
    crfs: list[int] | None = None,
    codec: str = "x264",
) -> PrepareResult:
    """Degrade all clips in a manifest in place.

    Raises MissingEncoderError up front when codec is "x264" and no
    encoder exists; per-clip problems are collected in the result
    instead of raised.
    """
    manifest_path = Path(manifest_path)
    root = manifest_path.parent
    crfs = list(crfs or [])
    if codec == "x264":
        from .codec import require_encoder

        require_encoder()
        if not crfs:
            raise ValidationError("need at least one CRF value")
    elif codec != "none":
        raise ValidationError(f"unknown codec {codec!r}; expected 'x264' or 'none'")
    records = read_manifest(manifest_path)
    result = PrepareResult(0, 0, [])
    updated = []
    for rec in records:
        try:
            new_rec, done, skipped = _degrade_one(root, rec, scale, crfs, codec)
        except SoftvidError as exc:
            result.failures.append((rec.clip_id, str(exc)))
            updated.append(rec)
            continue
        updated.append(new_rec)
        result.degraded += done
        result.skipped += skipped
    write_manifest(manifest_path, updated)
    return result
