"""Mask value coding between {0, 1} label space and [-1, 1] diffusion space."""

from __future__ import annotations

import torch

from ctseg._exceptions import InvalidArgumentError


def is_binary(mask: torch.Tensor) -> bool:
    """Return True when every element of ``mask`` is exactly 0 or 1."""
    return bool(((mask == 0) | (mask == 1)).all())


def encode_mask(mask: torch.Tensor) -> torch.Tensor:
    """Map a binary label mask {0, 1} onto {-1, +1}.

    Raises:
        InvalidArgumentError: If ``mask`` holds anything other than 0 and 1.
    """
    if not is_binary(mask):
        msg = "encode_mask expects a binary {0, 1} mask"
        raise InvalidArgumentError(msg)
    return mask.to(torch.get_default_dtype()) * 2.0 - 1.0


def decode_mask(x: torch.Tensor) -> torch.Tensor:
    """Map diffusion-space values back to a probability map, clipped to [0, 1]."""
    return ((x + 1.0) / 2.0).clamp(0.0, 1.0)


def binarize(p: torch.Tensor, threshold: float = 0.5) -> torch.Tensor:
    """Threshold a probability map into a {0, 1} uint8 mask.

    Raises:
        InvalidArgumentError: If ``threshold`` is not in (0, 1).
    """
    if not 0 < threshold < 1:
        msg = f"threshold must lie in (0, 1), got {threshold}"
        raise InvalidArgumentError(msg)
    return (p >= threshold).to(torch.uint8)
