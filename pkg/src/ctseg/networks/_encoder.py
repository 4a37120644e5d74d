"""Condition encoder h: image -> multi-scale features and auxiliary logits."""

from __future__ import annotations

import torch
import torch.nn.functional as F
from torch import nn

from ctseg._config import ArchitectureConfig
from ctseg.networks._blocks import Downsample, ResBlock, Upsample, group_norm
from ctseg.networks._types import ConditionFeaturePyramid


class ConditionEncoder(nn.Module):
    """Small UNet over the image whose decoder outputs form the feature pyramid.

    Decoder level i emits ``arch.level_channels[i]`` channels, matching the
    denoiser decoder so the two can be fused channel by channel.
    """

    def __init__(self, arch: ArchitectureConfig) -> None:
        super().__init__()
        channels = arch.level_channels
        self.depth = arch.depth
        self.stem = nn.Conv2d(1, channels[0], 3, padding=1)
        self.down_blocks = nn.ModuleList()
        self.downsamples = nn.ModuleList()
        prev = channels[0]
        for i, ch in enumerate(channels):
            self.down_blocks.append(ResBlock(prev, ch))
            if i < self.depth - 1:
                self.downsamples.append(Downsample(ch, ch))
            prev = ch
        self.bottleneck = ResBlock(channels[-1], channels[-1])
        self.upsamples = nn.ModuleList()
        self.up_blocks = nn.ModuleList()
        for i in reversed(range(self.depth - 1)):
            self.upsamples.append(Upsample(channels[i + 1], channels[i]))
            self.up_blocks.append(ResBlock(2 * channels[i], channels[i]))
        self.head_norm = group_norm(channels[0])
        self.head = nn.Conv2d(channels[0], 1, 1)

    def forward(self, x_d: torch.Tensor) -> ConditionFeaturePyramid:
        """Encode a preprocessed image batch into features and mask logits."""
        h = self.stem(x_d)
        skips = []
        for i, block in enumerate(self.down_blocks):
            h = block(h)
            skips.append(h)
            if i < self.depth - 1:
                h = self.downsamples[i](h)
        h = self.bottleneck(h)
        features = [h]
        for level, up, block in zip(
            reversed(range(self.depth - 1)), self.upsamples, self.up_blocks, strict=True
        ):
            h = block(torch.cat([up(h), skips[level]], dim=1))
            features.append(h)
        features.reverse()
        logits = self.head(F.silu(self.head_norm(features[0])))
        return ConditionFeaturePyramid(features=tuple(features), aux_prediction=logits)
