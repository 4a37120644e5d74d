"""Model-driven evaluation over a dataset split."""

from __future__ import annotations

import logging
from collections.abc import Sequence

from ctseg._config import SamplerConfig, ScheduleConfig
from ctseg._exceptions import InvalidArgumentError
from ctseg.data import SamplePair
from ctseg.metrics._report import EvaluationReport, evaluate_predictions
from ctseg.networks import ConsistencySegmenter
from ctseg.sampling._sampler import derive_seed, image_tensor, segment

logger = logging.getLogger(__name__)


def evaluate(
    model: ConsistencySegmenter,
    pairs: Sequence[SamplePair],
    schedule: ScheduleConfig,
    sampler: SamplerConfig,
    seed: int,
    *,
    use_multiscale: bool = True,
) -> EvaluationReport:
    """Segment every pair and aggregate Dice and IoU.

    Sample i is segmented with seed ``derive_seed(seed, i)``.

    Args:
        model: Model to evaluate.
        pairs: Split to evaluate, in order.
        schedule: Schedule constants.
        sampler: Sampler settings (threshold, number of steps).
        seed: Master sampling seed.
        use_multiscale: Fuse the condition pyramid.

    Returns:
        The evaluation report.

    Raises:
        InvalidArgumentError: If ``pairs`` is empty.
    """
    if not pairs:
        msg = "Cannot evaluate an empty split"
        raise InvalidArgumentError(msg)
    predictions = []
    for index, pair in enumerate(pairs):
        result = segment(
            model,
            image_tensor(pair.image, model),
            schedule,
            sampler,
            derive_seed(seed, index),
            use_multiscale=use_multiscale,
        )
        predictions.append((pair.id, result.mask[0, 0].numpy(), pair.mask))
    report = evaluate_predictions(predictions)
    logger.info(
        "Evaluated %d samples: dice=%.4f iou=%.4f", len(report), report.mean_dice, report.mean_iou
    )
    return report
