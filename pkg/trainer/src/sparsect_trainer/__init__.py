"""Training harness for sparse-view CT artifact-prediction datasets.

Consumes tensor-container samples and a dataset manifest, trains one of three
fully convolutional architectures per view level, and writes prediction
containers back in the layout the scoring tool reads.
"""

from .config import VARIANTS, TrainConfig
from .container import ContainerError, read_tensor, write_tensor
from .schedule import best_epoch, lr_schedule, stopped_epoch
from .training import CheckpointRecord, load_samples, predict, train

__version__ = "0.1.0"

__all__ = [
    "VARIANTS",
    "TrainConfig",
    "ContainerError",
    "read_tensor",
    "write_tensor",
    "best_epoch",
    "lr_schedule",
    "stopped_epoch",
    "CheckpointRecord",
    "load_samples",
    "predict",
    "train",
    "build_model",
    "__version__",
]


def build_model(*args, **kwargs):
    # deferred import keeps the TensorFlow load out of schedule/container use
    from .models import build_model as _build

    return _build(*args, **kwargs)
