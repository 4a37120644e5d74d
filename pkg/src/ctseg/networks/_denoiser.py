"""Denoiser g: a time-conditioned UNet fused with the condition pyramid."""

from __future__ import annotations

from collections.abc import Sequence

import torch
import torch.nn.functional as F
from torch import nn

from ctseg._config import ArchitectureConfig
from ctseg.networks._blocks import (
    ChannelGate,
    Downsample,
    ResBlock,
    Upsample,
    channel_attention_fuse,
    group_norm,
    time_embedding,
)


class Denoiser(nn.Module):
    """UNet over the scaled noisy mask.

    The embedding of log t is added inside every residual block. At each
    decoder level the matching condition feature is overlaid through a
    channel gate before that level's block.
    """

    def __init__(self, arch: ArchitectureConfig) -> None:
        super().__init__()
        channels = arch.level_channels
        self.depth = arch.depth
        self.time_embed_dim = arch.time_embed_dim
        emb_dim = 2 * arch.time_embed_dim
        self.time_mlp = nn.Sequential(
            nn.Linear(arch.time_embed_dim, emb_dim),
            nn.SiLU(),
            nn.Linear(emb_dim, emb_dim),
        )
        self.stem = nn.Conv2d(1, channels[0], 3, padding=1)
        self.down_blocks = nn.ModuleList()
        self.downsamples = nn.ModuleList()
        prev = channels[0]
        for i, ch in enumerate(channels):
            self.down_blocks.append(ResBlock(prev, ch, emb_dim))
            if i < self.depth - 1:
                self.downsamples.append(Downsample(ch, ch))
            prev = ch
        self.bottleneck = ResBlock(channels[-1], channels[-1], emb_dim)
        self.deep_gate = ChannelGate(channels[-1], arch.reduction)
        self.deep_block = ResBlock(channels[-1], channels[-1], emb_dim)
        self.upsamples = nn.ModuleList()
        self.merges = nn.ModuleList()
        self.gates = nn.ModuleList()
        self.up_blocks = nn.ModuleList()
        for i in reversed(range(self.depth - 1)):
            self.upsamples.append(Upsample(channels[i + 1], channels[i]))
            self.merges.append(nn.Conv2d(2 * channels[i], channels[i], 1))
            self.gates.append(ChannelGate(channels[i], arch.reduction))
            self.up_blocks.append(ResBlock(channels[i], channels[i], emb_dim))
        self.out_norm = group_norm(channels[0])
        self.out = nn.Conv2d(channels[0], 1, 3, padding=1)

    def forward(
        self, x_in: torch.Tensor, features: Sequence[torch.Tensor], t: float
    ) -> torch.Tensor:
        """Predict the raw denoiser output F for input ``x_in`` at noise level ``t``."""
        emb = time_embedding(t, self.time_embed_dim, dtype=x_in.dtype, device=x_in.device)
        emb = self.time_mlp(emb).expand(x_in.shape[0], -1)

        h = self.stem(x_in)
        skips = []
        for i, block in enumerate(self.down_blocks):
            h = block(h, emb)
            skips.append(h)
            if i < self.depth - 1:
                h = self.downsamples[i](h)
        h = self.bottleneck(h, emb)
        h = self.deep_block(channel_attention_fuse(h, features[-1], self.deep_gate), emb)
        for level, up, merge, gate, block in zip(
            reversed(range(self.depth - 1)),
            self.upsamples,
            self.merges,
            self.gates,
            self.up_blocks,
            strict=True,
        ):
            h = merge(torch.cat([up(h), skips[level]], dim=1))
            h = block(channel_attention_fuse(h, features[level], gate), emb)
        return self.out(F.silu(self.out_norm(h)))
