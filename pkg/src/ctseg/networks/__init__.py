"""Neural components: condition encoder h, denoiser g and the consistency function f."""

from ctseg._config import ArchitectureConfig
from ctseg.networks._blocks import ChannelGate, ResBlock, channel_attention_fuse, time_embedding
from ctseg.networks._denoiser import Denoiser
from ctseg.networks._encoder import ConditionEncoder
from ctseg.networks._model import (
    ConsistencySegmenter,
    consistency_forward,
    denoiser_forward,
    encoder_forward,
    init_params,
    parameter_inventory,
)
from ctseg.networks._types import ConditionFeaturePyramid, ConsistencyOutput

__all__ = [
    "ArchitectureConfig",
    "ChannelGate",
    "ConditionEncoder",
    "ConditionFeaturePyramid",
    "ConsistencyOutput",
    "ConsistencySegmenter",
    "Denoiser",
    "ResBlock",
    "channel_attention_fuse",
    "consistency_forward",
    "denoiser_forward",
    "encoder_forward",
    "init_params",
    "parameter_inventory",
    "time_embedding",
]
