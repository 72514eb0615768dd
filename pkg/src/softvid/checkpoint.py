"""Versioned training checkpoints.

A checkpoint is a pickled dict with a format version and, under it, the
generator/discriminator parameters, both optimizer states, the step
counters, a config snapshot, and the RNG state.  All tensors are stored
as numpy arrays so the same state always serializes to the same bytes:
save -> load -> save round-trips identically, which the tests check.
Parameter arrays keep their module state-dict names (for example
``video.stem.weight``).
"""

from __future__ import annotations

import pickle
from pathlib import Path

import numpy as np
import torch

from .errors import CheckpointError

FORMAT_VERSION = 1


def _to_plain(obj):
    if isinstance(obj, torch.Tensor):
        return {"__tensor__": obj.detach().cpu().numpy()}
    if isinstance(obj, dict):
        return {k: _to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        converted = [_to_plain(v) for v in obj]
        return converted if isinstance(obj, list) else tuple(converted)
    return obj


def _to_torch(obj):
    if isinstance(obj, dict):
        if set(obj) == {"__tensor__"}:
            return torch.from_numpy(obj["__tensor__"].copy())
        return {k: _to_torch(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        converted = [_to_torch(v) for v in obj]
        return converted if isinstance(obj, list) else tuple(converted)
    return obj


def save_checkpoint(path: str | Path, payload: dict) -> None:
    """Write a checkpoint; tensors anywhere in the payload are converted.

    The pickler runs with its memo disabled: the stream then depends
    only on the payload's values, not on which string or tuple objects
    happen to be shared, which is what makes equal states serialize to
    equal bytes.  The payload tree is acyclic so this is safe.
    """
    blob = {"version": FORMAT_VERSION, "payload": _to_plain(payload)}
    with open(path, "wb") as fh:
        pickler = pickle.Pickler(fh, protocol=4)
        pickler.fast = True
        pickler.dump(blob)


def load_checkpoint(path: str | Path) -> dict:
    """Read a checkpoint, checking the format version."""
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"checkpoint not found: {path}")
    try:
        with open(path, "rb") as fh:
            blob = pickle.load(fh)
    except (pickle.UnpicklingError, EOFError, AttributeError, ValueError) as exc:
        raise CheckpointError(f"{path}: corrupt checkpoint ({exc})") from exc
    if not isinstance(blob, dict) or "version" not in blob:
        raise CheckpointError(f"{path}: not a checkpoint file")
    if blob["version"] != FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: format version {blob['version']}, expected {FORMAT_VERSION}"
        )
    return _to_torch(blob["payload"])
