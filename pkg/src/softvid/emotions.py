"""Emotion state codes.

A speaker's expression is one of 15 states: 8 emotion classes times 2
intensity levels, except that "neutral" carries no intensity and collapses
to a single state.  States are exchanged as a small integer index or the
equivalent 15-dim one-hot vector; the encoder side is assumed to have
labelled the clip already, so this module only encodes/decodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

EMOTION_TYPES = (
    "neutral",
    "calm",
    "happy",
    "sad",
    "angry",
    "fearful",
    "disgust",
    "surprised",
)

INTENSITIES = ("normal", "strong")

NUM_STATES = 15


@dataclass(frozen=True)
class EmotionState:
    """One of the 15 emotion states, as index plus one-hot vector."""

    index: int

    @property
    def onehot(self) -> np.ndarray:
        v = np.zeros(NUM_STATES, dtype=np.float64)
        v[self.index] = 1.0
        return v

    def __post_init__(self):
        if not 0 <= self.index < NUM_STATES:
            raise ValidationError(
                f"emotion index {self.index} outside [0, {NUM_STATES})"
            )


def encode_emotion(emotion_type: str, intensity: str = "normal") -> EmotionState:
    """Map an (emotion type, intensity) pair to its emotion state.

    "neutral" has no intensity level; ("neutral", "strong") is rejected.
    """
    if emotion_type not in EMOTION_TYPES:
        raise ValidationError(
            f"unknown emotion type {emotion_type!r}; expected one of "
            f"{', '.join(EMOTION_TYPES)}"
        )
    if intensity not in INTENSITIES:
        raise ValidationError(
            f"unknown intensity {intensity!r}; expected 'normal' or 'strong'"
        )
    if emotion_type == "neutral":
        if intensity == "strong":
            raise ValidationError("neutral has no intensity level")
        return EmotionState(0)
    cls = EMOTION_TYPES.index(emotion_type)
    return EmotionState(1 + 2 * (cls - 1) + INTENSITIES.index(intensity))


def decode_emotion(index: int) -> tuple[str, str]:
    """Inverse of :func:`encode_emotion`."""
    state = EmotionState(index)  # range check
    if state.index == 0:
        return "neutral", "normal"
    cls, level = divmod(state.index - 1, 2)
    return EMOTION_TYPES[cls + 1], INTENSITIES[level]


def state_name(index: int) -> str:
    """Canonical name of a state: "neutral" or "<type>-<intensity>"."""
    etype, intensity = decode_emotion(index)
    if etype == "neutral":
        return "neutral"
    return f"{etype}-{intensity}"


def parse_state_name(name: str) -> EmotionState:
    """Parse a canonical state name back to an EmotionState."""
    if name == "neutral":
        return EmotionState(0)
    parts = name.split("-")
    if len(parts) == 2:
        try:
            return encode_emotion(parts[0], parts[1])
        except ValidationError:
            pass
    raise ValidationError(
        f"unknown emotion state {name!r}; expected one of: "
        + ", ".join(all_state_names())
    )


def all_state_names() -> list[str]:
    return [state_name(i) for i in range(NUM_STATES)]
