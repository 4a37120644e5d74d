"""Building blocks shared by the condition encoder and the denoiser."""

from __future__ import annotations

import math
from typing import Final

import torch
import torch.nn.functional as F
from torch import nn

from ctseg._exceptions import InvalidArgumentError

#: Maximum number of GroupNorm groups.
MAX_NORM_GROUPS: Final[int] = 8

#: Base period of the sinusoidal embedding.
MAX_PERIOD: Final[float] = 10000.0


def group_norm(channels: int) -> nn.GroupNorm:
    """GroupNorm with the largest group count <= 8 dividing ``channels``."""
    return nn.GroupNorm(math.gcd(channels, MAX_NORM_GROUPS), channels)


def time_embedding(
    t: float,
    dim: int,
    *,
    dtype: torch.dtype | None = None,
    device: torch.device | None = None,
) -> torch.Tensor:
    """Sinusoidal embedding of log t.

    The first half of the vector holds sines, the second half cosines, with
    geometrically spaced frequencies. The input is ln(t) / 4, which keeps the
    lowest-frequency sine monotone over [0.002, 80].

    Args:
        t: Noise level, strictly positive.
        dim: Embedding width, even and >= 2.
        dtype: Result dtype (default dtype when None).
        device: Result device.

    Returns:
        A tensor of shape (dim,) with components in [-1, 1].

    Raises:
        InvalidArgumentError: If ``t <= 0`` or ``dim`` is odd or < 2.
    """
    if t <= 0:
        msg = f"time_embedding needs t > 0, got {t}"
        raise InvalidArgumentError(msg)
    if dim < 2 or dim % 2:
        msg = f"time_embedding dim must be even and >= 2, got {dim}"
        raise InvalidArgumentError(msg)
    half = dim // 2
    dtype = dtype or torch.get_default_dtype()
    freqs = torch.exp(
        -math.log(MAX_PERIOD) * torch.arange(half, dtype=dtype, device=device) / half
    )
    angles = (math.log(t) / 4.0) * freqs
    return torch.cat([angles.sin(), angles.cos()])


class ResBlock(nn.Module):
    """Two 3x3 convolutions with GroupNorm, SiLU and an optional time shift."""

    def __init__(self, in_channels: int, out_channels: int, emb_dim: int | None = None) -> None:
        super().__init__()
        self.norm1 = group_norm(in_channels)
        self.conv1 = nn.Conv2d(in_channels, out_channels, 3, padding=1)
        self.emb_proj = nn.Linear(emb_dim, out_channels) if emb_dim else None
        self.norm2 = group_norm(out_channels)
        self.conv2 = nn.Conv2d(out_channels, out_channels, 3, padding=1)
        self.skip = (
            nn.Conv2d(in_channels, out_channels, 1)
            if in_channels != out_channels
            else nn.Identity()
        )

    def forward(self, x: torch.Tensor, emb: torch.Tensor | None = None) -> torch.Tensor:
        """Apply the block, adding the projected time embedding when given."""
        h = self.conv1(F.silu(self.norm1(x)))
        if self.emb_proj is not None and emb is not None:
            h = h + self.emb_proj(F.silu(emb))[..., None, None]
        h = self.conv2(F.silu(self.norm2(h)))
        return self.skip(x) + h


class Downsample(nn.Module):
    """Strided 3x3 convolution halving the spatial size."""

    def __init__(self, in_channels: int, out_channels: int) -> None:
        super().__init__()
        self.conv = nn.Conv2d(in_channels, out_channels, 3, stride=2, padding=1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """Downsample ``x`` by two."""
        return self.conv(x)


class Upsample(nn.Module):
    """Nearest-neighbour doubling followed by a 3x3 convolution."""

    def __init__(self, in_channels: int, out_channels: int) -> None:
        super().__init__()
        self.conv = nn.Conv2d(in_channels, out_channels, 3, padding=1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """Upsample ``x`` by two."""
        return self.conv(F.interpolate(x, scale_factor=2.0, mode="nearest"))


class ChannelGate(nn.Module):
    """Squeeze-and-excitation gate over a decoder/condition feature pair.

    Global average pooling of concat(u, s) feeds a two-layer MLP whose sigmoid
    output weights the C channels of the condition feature.
    """

    def __init__(self, channels: int, reduction: int) -> None:
        """Initialize the gate.

        Args:
            channels: Channel count C shared by u and s.
            reduction: Reduction ratio r; the hidden width is max(2C // r, 1).
        """
        super().__init__()
        self.channels = channels
        hidden = max(2 * channels // reduction, 1)
        self.fc1 = nn.Linear(2 * channels, hidden)
        self.fc2 = nn.Linear(hidden, channels)

    def forward(self, u: torch.Tensor, s: torch.Tensor) -> torch.Tensor:
        """Return channel weights in (0, 1), shaped (B, C, 1, 1)."""
        pooled = torch.cat([u, s], dim=1).mean(dim=(2, 3))
        weights = torch.sigmoid(self.fc2(F.relu(self.fc1(pooled))))
        return weights[..., None, None]


def channel_attention_fuse(u: torch.Tensor, s: torch.Tensor, gate: ChannelGate) -> torch.Tensor:
    """Overlay the condition feature ``s`` onto the decoder feature ``u``.

    Computes ``u + w * s`` with ``w = gate(u, s)``.

    Raises:
        InvalidArgumentError: If ``u`` and ``s`` differ in shape or do not
            carry the gate's channel count.
    """
    if u.shape != s.shape:
        msg = f"channel_attention_fuse shape mismatch: {tuple(u.shape)} vs {tuple(s.shape)}"
        raise InvalidArgumentError(msg)
    if u.dim() != 4 or u.shape[1] != gate.channels:
        msg = f"channel_attention_fuse expects (B, {gate.channels}, H, W), got {tuple(u.shape)}"
        raise InvalidArgumentError(msg)
    return u + gate(u, s) * s
