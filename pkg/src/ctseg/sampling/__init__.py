"""Inference: single-step and multistep consistency segmentation, batch prediction."""

from ctseg._config import SamplerConfig
from ctseg.sampling._predict import METRICS_NAME, predict_batch, predict_images
from ctseg.sampling._sampler import (
    SegmentationResult,
    derive_seed,
    image_tensor,
    multistep_sigmas,
    segment,
    segment_multistep,
    segment_single_step,
)

__all__ = [
    "METRICS_NAME",
    "SamplerConfig",
    "SegmentationResult",
    "derive_seed",
    "image_tensor",
    "multistep_sigmas",
    "predict_batch",
    "predict_images",
    "segment",
    "segment_multistep",
    "segment_single_step",
]
