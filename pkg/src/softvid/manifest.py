"""Dataset manifests: one JSON record per clip, one clip per line.

A manifest lives at the root of a dataset directory and references the
clip files by relative path.  Records carry the emotion label and split
so that training and evaluation never re-derive them from filenames.
Data preparation fills in ``lq_videos``, a map from degradation label
(``crf15`` ... or ``down`` for plain downscaling) to the degraded file,
and ``mfcc`` with the cached coefficient table.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .au import load_au_file
from .clips import check_clip, load_face_boxes, load_video, load_wav
from .emotions import decode_emotion
from .errors import FormatError, ValidationError
from .windows import ClipWindows

SPLITS = ("train", "val", "test")


@dataclass
class ClipRecord:
    """Paths and labels for one clip, all paths relative to the manifest."""

    clip_id: str
    hq_video: str
    audio: str
    au_file: str
    face_boxes: str
    emotion_index: int
    fps: float
    split: str
    lq_videos: dict[str, str] = field(default_factory=dict)
    mfcc: str | None = None

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ValidationError(
                f"clip {self.clip_id}: split must be one of {SPLITS}, got {self.split!r}"
            )
        decode_emotion(self.emotion_index)


def degradation_labels(records: list[ClipRecord]) -> list[str]:
    """Labels every record has been degraded at, sorted."""
    labels: set[str] | None = None
    for rec in records:
        labels = set(rec.lq_videos) if labels is None else labels & set(rec.lq_videos)
    return sorted(labels or ())


def write_manifest(path: str | Path, records: list[ClipRecord]) -> None:
    seen = set()
    for rec in records:
        if rec.clip_id in seen:
            raise ValidationError(f"duplicate clip_id {rec.clip_id!r}")
        seen.add(rec.clip_id)
    with open(path, "w") as fh:
        for rec in records:
            row = {k: v for k, v in asdict(rec).items() if v not in (None, {})}
            fh.write(json.dumps(row) + "\n")


def read_manifest(path: str | Path) -> list[ClipRecord]:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"manifest not found: {path}")
    records = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: invalid JSON ({exc})") from exc
            try:
                records.append(ClipRecord(**row))
            except TypeError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from exc
    if not records:
        raise ValidationError(f"manifest {path} lists no clips")
    return records


def load_clip_windows(
    root: str | Path, rec: ClipRecord, n: int, label: str
) -> ClipWindows:
    """Load one clip's files and wrap them as training windows.

    ``label`` selects which degraded variant to pair with the ground
    truth; the clip must have been prepared at that label already.
    """
    root = Path(root)
    if label not in rec.lq_videos:
        have = ", ".join(sorted(rec.lq_videos)) or "none"
        raise ValidationError(
            f"clip {rec.clip_id} has no {label!r} degraded video (prepared: {have}); "
            "run prepare-data first"
        )
    hq = load_video(root / rec.hq_video)
    lq = load_video(root / rec.lq_videos[label])
    audio, rate = load_wav(root / rec.audio)
    au, _ = load_au_file(root / rec.au_file)
    boxes = load_face_boxes(root / rec.face_boxes, len(hq))
    check_clip(hq, rec.fps, audio, rate, boxes)
    if au.shape[0] != len(hq):
        raise ValidationError(
            f"clip {rec.clip_id}: {au.shape[0]} AU rows for {len(hq)} frames"
        )
    mfcc = None
    if rec.mfcc is not None:
        mfcc = np.load(root / rec.mfcc)
        if mfcc.shape[0] != len(hq):
            raise FormatError(
                f"clip {rec.clip_id}: cached MFCC has {mfcc.shape[0]} rows "
                f"for {len(hq)} frames"
            )
    return ClipWindows(
        clip_id=rec.clip_id,
        lq_frames=lq,
        hq_frames=hq,
        audio=audio,
        rate=rate,
        fps=rec.fps,
        emotion_index=rec.emotion_index,
        au=au,
        boxes=boxes,
        n=n,
        mfcc=mfcc,
    )


def load_split(
    root: str | Path, records: list[ClipRecord], split: str, n: int, label: str
) -> list[ClipWindows]:
    """ClipWindows for every record in the given split."""
    chosen = [rec for rec in records if rec.split == split]
    if not chosen:
        raise ValidationError(f"no clips in split {split!r}")
    return [load_clip_windows(root, rec, n, label) for rec in chosen]
