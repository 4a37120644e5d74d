"""Network output records for ctseg."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import torch


@dataclass(frozen=True, slots=True, eq=False)
class ConditionFeaturePyramid:
    """Multi-scale condition features produced by the encoder.

    Attributes:
        features: One map per level, full resolution first; level i has
            spatial size (H / 2**i, W / 2**i) for zero-based i.
        aux_prediction: Single-channel logit map at input resolution.
    """

    features: tuple[torch.Tensor, ...]
    aux_prediction: torch.Tensor

    @property
    def depth(self) -> int:
        """Number of levels."""
        return len(self.features)

    def zeros_like(self) -> ConditionFeaturePyramid:
        """Return a pyramid with every feature map zeroed and the same ŷ."""
        return ConditionFeaturePyramid(
            features=tuple(torch.zeros_like(f) for f in self.features),
            aux_prediction=self.aux_prediction,
        )


class ConsistencyOutput(NamedTuple):
    """Result of one consistency-function evaluation.

    Attributes:
        y: Boundary-conditioned output, same shape as the noisy input.
        aux_logits: Encoder logits ŷ used by the segmentation loss.
    """

    y: torch.Tensor
    aux_logits: torch.Tensor
