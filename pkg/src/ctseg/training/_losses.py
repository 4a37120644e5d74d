"""Consistency, segmentation and combined losses."""

from __future__ import annotations

import torch

from ctseg._exceptions import InvalidArgumentError
from ctseg.preprocessing import is_binary


def _check_shapes(a: torch.Tensor, b: torch.Tensor, name: str) -> None:
    if a.shape != b.shape:
        msg = f"{name}: shape mismatch {tuple(a.shape)} vs {tuple(b.shape)}"
        raise InvalidArgumentError(msg)


def ct_loss(
    y_online: torch.Tensor, y_target: torch.Tensor, lambda_weight: float = 1.0
) -> torch.Tensor:
    """Consistency loss λ · mean((y_online - y_target)²).

    Raises:
        InvalidArgumentError: If the shapes differ.
    """
    _check_shapes(y_online, y_target, "ct_loss")
    return lambda_weight * torch.mean((y_online - y_target) ** 2)


def seg_loss(y_hat_logits: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
    """Segmentation loss mean((sigmoid(ŷ) - mask)²) against a {0, 1} mask.

    Raises:
        InvalidArgumentError: If the shapes differ or ``mask`` is not binary.
    """
    _check_shapes(y_hat_logits, mask, "seg_loss")
    if not is_binary(mask):
        msg = "seg_loss expects a binary {0, 1} mask"
        raise InvalidArgumentError(msg)
    return torch.mean((torch.sigmoid(y_hat_logits) - mask.to(y_hat_logits.dtype)) ** 2)


def total_loss(l_ct: torch.Tensor, l_s: torch.Tensor, alpha: float) -> torch.Tensor:
    """Combined loss l_ct + α · l_s."""
    return l_ct + alpha * l_s
