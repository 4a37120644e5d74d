"""Exponential moving average of the online parameters into the target model."""

from __future__ import annotations

import torch
from torch import nn

from ctseg._exceptions import InvalidArgumentError
from ctseg.networks import parameter_inventory


def ema_update(target: nn.Module, online: nn.Module, mu: float) -> None:
    """Set every target parameter to μ · target + (1 - μ) · online, in place.

    The update runs under ``torch.no_grad`` so the target never joins the
    autograd graph.

    Raises:
        InvalidArgumentError: If ``mu`` is outside [0, 1] or the two models do
            not share the same parameter names and shapes.
    """
    if not 0.0 <= mu <= 1.0:
        msg = f"EMA decay must lie in [0, 1], got {mu}"
        raise InvalidArgumentError(msg)
    if parameter_inventory(target) != parameter_inventory(online):
        msg = "EMA update needs shape-congruent target and online models"
        raise InvalidArgumentError(msg)
    online_params = dict(online.named_parameters())
    with torch.no_grad():
        for name, p_target in target.named_parameters():
            p_target.mul_(mu).add_(online_params[name], alpha=1.0 - mu)
