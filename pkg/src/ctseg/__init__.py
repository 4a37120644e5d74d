"""ctseg - consistency-training image segmentation with single-step inference.

from pathlib import Path

from ctseg import RunConfig, SyntheticConfig, generate_synthetic_dataset, load_dataset, train_loop

generate_synthetic_dataset(SyntheticConfig(seed=7), Path("data"))
cfg = RunConfig().with_total_steps(5000)
dataset = load_dataset(Path("data"), cfg.preprocess)
result = train_loop(cfg, dataset, Path("runs/m"))
"""

import logging

from ctseg._config import (
    ArchitectureConfig,
    PreprocessConfig,
    RunConfig,
    SamplerConfig,
    ScheduleConfig,
    SyntheticConfig,
    TrainerConfig,
)
from ctseg._exceptions import (
    CheckpointError,
    CTSError,
    DatasetError,
    InvalidArgumentError,
    NumericalError,
)
from ctseg.data import (
    Batch,
    DatasetManifest,
    SamplePair,
    SegmentationDataset,
    generate_synthetic_dataset,
    iterate_batches,
    load_dataset,
)
from ctseg.metrics import EvaluationReport, dice, evaluate, evaluate_predictions, iou
from ctseg.networks import (
    ConditionFeaturePyramid,
    ConsistencySegmenter,
    channel_attention_fuse,
    consistency_forward,
    denoiser_forward,
    encoder_forward,
    init_params,
    time_embedding,
)
from ctseg.preprocessing import (
    anisotropic_diffusion,
    binarize,
    decode_mask,
    encode_mask,
    normalize_image,
    preprocess_image,
)
from ctseg.sampling import (
    multistep_sigmas,
    predict_batch,
    segment_multistep,
    segment_single_step,
)
from ctseg.schedules import boundary_coeffs, ema_decay, karras_sigmas, step_schedule
from ctseg.training import (
    CheckpointManifest,
    LossBreakdown,
    TrainerState,
    ct_loss,
    ema_update,
    load_checkpoint,
    save_checkpoint,
    seg_loss,
    total_loss,
    train_loop,
    train_step,
)

__all__ = [
    # Configuration
    "ArchitectureConfig",
    "PreprocessConfig",
    "RunConfig",
    "SamplerConfig",
    "ScheduleConfig",
    "SyntheticConfig",
    "TrainerConfig",
    # Schedules
    "boundary_coeffs",
    "ema_decay",
    "karras_sigmas",
    "step_schedule",
    # Preprocessing
    "anisotropic_diffusion",
    "binarize",
    "decode_mask",
    "encode_mask",
    "normalize_image",
    "preprocess_image",
    # Data
    "Batch",
    "DatasetManifest",
    "SamplePair",
    "SegmentationDataset",
    "generate_synthetic_dataset",
    "iterate_batches",
    "load_dataset",
    # Networks
    "ConditionFeaturePyramid",
    "ConsistencySegmenter",
    "channel_attention_fuse",
    "consistency_forward",
    "denoiser_forward",
    "encoder_forward",
    "init_params",
    "time_embedding",
    # Training
    "CheckpointManifest",
    "LossBreakdown",
    "TrainerState",
    "ct_loss",
    "ema_update",
    "load_checkpoint",
    "save_checkpoint",
    "seg_loss",
    "total_loss",
    "train_loop",
    "train_step",
    # Sampling
    "multistep_sigmas",
    "predict_batch",
    "segment_multistep",
    "segment_single_step",
    # Metrics
    "EvaluationReport",
    "dice",
    "evaluate",
    "evaluate_predictions",
    "iou",
    # Exceptions
    "CTSError",
    "CheckpointError",
    "DatasetError",
    "InvalidArgumentError",
    "NumericalError",
]

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())
