"""Consistency training: losses, EMA target updates, the training loop and checkpoints."""

from ctseg._config import TrainerConfig
from ctseg.training._checkpoint import (
    CHECKPOINT_MANIFEST,
    CHECKPOINTS_DIR,
    WEIGHTS_NAME,
    checkpoint_dir,
    list_checkpoints,
    load_checkpoint,
    read_checkpoint,
    resolve_checkpoint,
    save_checkpoint,
)
from ctseg.training._ema import ema_update
from ctseg.training._loop import LOG_NAME, train_loop
from ctseg.training._losses import ct_loss, seg_loss, total_loss
from ctseg.training._step import init_trainer_state, make_optimizer, make_target, train_step
from ctseg.training._types import (
    CHECKPOINT_FORMAT_VERSION,
    CheckpointManifest,
    LossBreakdown,
    TrainerState,
    TrainResult,
)

__all__ = [
    "CHECKPOINTS_DIR",
    "CHECKPOINT_FORMAT_VERSION",
    "CHECKPOINT_MANIFEST",
    "LOG_NAME",
    "WEIGHTS_NAME",
    "CheckpointManifest",
    "LossBreakdown",
    "TrainResult",
    "TrainerConfig",
    "TrainerState",
    "checkpoint_dir",
    "ct_loss",
    "ema_update",
    "init_trainer_state",
    "list_checkpoints",
    "load_checkpoint",
    "make_optimizer",
    "make_target",
    "read_checkpoint",
    "resolve_checkpoint",
    "save_checkpoint",
    "seg_loss",
    "total_loss",
    "train_loop",
    "train_step",
]
