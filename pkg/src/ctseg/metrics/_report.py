"""Dataset-level evaluation reports."""

from __future__ import annotations

import logging
from collections.abc import Iterable
from dataclasses import dataclass
from typing import Any

import numpy as np

from ctseg._exceptions import InvalidArgumentError
from ctseg._types import MaskGrid
from ctseg.metrics._overlap import dice, iou

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class SampleScore:
    """Scores of one prediction.

    Attributes:
        id: Sample identifier.
        dice: Dice coefficient.
        iou: Intersection over union.
    """

    id: str
    dice: float
    iou: float


@dataclass(frozen=True, slots=True)
class EvaluationReport:
    """Mean and per-sample Dice/IoU over one split.

    Attributes:
        mean_dice: Arithmetic mean of the per-sample Dice scores.
        mean_iou: Arithmetic mean of the per-sample IoU scores.
        per_sample: Scores in evaluation order.
    """

    mean_dice: float
    mean_iou: float
    per_sample: tuple[SampleScore, ...]

    def __len__(self) -> int:
        return len(self.per_sample)

    def to_dict(self) -> dict[str, Any]:
        """Return the JSON-serializable form."""
        return {
            "mean_dice": self.mean_dice,
            "mean_iou": self.mean_iou,
            "per_sample": [{"id": s.id, "dice": s.dice, "iou": s.iou} for s in self.per_sample],
        }


def evaluate_predictions(
    predictions: Iterable[tuple[str, MaskGrid, MaskGrid]],
) -> EvaluationReport:
    """Score (id, predicted mask, ground-truth mask) triples.

    Passing the ground truth as the prediction gives mean Dice = mean IoU = 1.

    Raises:
        InvalidArgumentError: If ``predictions`` is empty or any pair is invalid.
    """
    scores = []
    empty = 0
    for sample_id, pred, gt in predictions:
        scores.append(SampleScore(id=sample_id, dice=dice(pred, gt), iou=iou(pred, gt)))
        if not np.any(pred):
            empty += 1
    if not scores:
        msg = "Cannot evaluate an empty set of predictions"
        raise InvalidArgumentError(msg)
    if empty:
        logger.warning("%d of %d predictions are empty", empty, len(scores))
    return EvaluationReport(
        mean_dice=float(np.mean([s.dice for s in scores])),
        mean_iou=float(np.mean([s.iou for s in scores])),
        per_sample=tuple(scores),
    )
