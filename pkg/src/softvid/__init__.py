"""Soft decoding of aggressively compressed talking-head video.

The restoration network fuses three streams around each frame: a window
of degraded video frames, the matching audio cepstral rows, and a
categorical emotion state.  See the README for the pipeline walkthrough.
"""

from .config import ModelConfig, TrainConfig, train_config
from .errors import (
    CheckpointError,
    EnvironmentFailure,
    FormatError,
    MissingEncoderError,
    SoftvidError,
    TrainingDiverged,
    ValidationError,
)
from .model import Restorer

__version__ = "0.1.0"

__all__ = [
    "ModelConfig",
    "TrainConfig",
    "train_config",
    "Restorer",
    "SoftvidError",
    "ValidationError",
    "FormatError",
    "EnvironmentFailure",
    "MissingEncoderError",
    "CheckpointError",
    "TrainingDiverged",
    "__version__",
]
