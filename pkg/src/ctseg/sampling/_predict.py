"""Batch prediction to mask and overlay PNGs."""

from __future__ import annotations

import json
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Final

from ctseg._config import PreprocessConfig, SamplerConfig, ScheduleConfig
from ctseg._exceptions import InvalidArgumentError
from ctseg._types import ImageGrid, MaskGrid
from ctseg.data import SamplePair
from ctseg.metrics._report import EvaluationReport, evaluate_predictions
from ctseg.networks import ConsistencySegmenter
from ctseg.preprocessing import (
    preprocess_image,
    read_image_png,
    write_mask_png,
    write_overlay_png,
)
from ctseg.sampling._sampler import derive_seed, image_tensor, segment

logger = logging.getLogger(__name__)

METRICS_NAME: Final[str] = "metrics.json"


def _write_outputs(
    out_dir: Path, sample_id: str, image: ImageGrid, mask: MaskGrid
) -> tuple[Path, Path]:
    mask_path = out_dir / f"{sample_id}_mask.png"
    overlay_path = out_dir / f"{sample_id}_overlay.png"
    write_mask_png(mask_path, mask)
    write_overlay_png(overlay_path, image, mask)
    return mask_path, overlay_path


def predict_batch(
    model: ConsistencySegmenter,
    pairs: Sequence[SamplePair],
    out_dir: Path,
    schedule: ScheduleConfig,
    sampler: SamplerConfig,
    seed: int,
    *,
    use_multiscale: bool = True,
) -> EvaluationReport:
    """Segment a split, write ``<id>_mask.png`` / ``<id>_overlay.png`` and ``metrics.json``.

    Sample i uses seed ``derive_seed(seed, i)``, matching ``evaluate``.

    Raises:
        InvalidArgumentError: If ``pairs`` is empty.
        OSError: If an output file cannot be written.
    """
    if not pairs:
        msg = "Cannot predict an empty split"
        raise InvalidArgumentError(msg)
    out_dir.mkdir(parents=True, exist_ok=True)
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
        mask = result.mask[0, 0].numpy()
        _write_outputs(out_dir, pair.id, pair.image, mask)
        predictions.append((pair.id, mask, pair.mask))
    report = evaluate_predictions(predictions)
    text = json.dumps(report.to_dict(), indent=2) + "\n"
    (out_dir / METRICS_NAME).write_text(text, encoding="utf-8")
    logger.info("Wrote %d predictions to %s", len(report), out_dir)
    return report


def predict_images(
    model: ConsistencySegmenter,
    paths: Sequence[Path],
    out_dir: Path,
    schedule: ScheduleConfig,
    sampler: SamplerConfig,
    preprocess: PreprocessConfig,
    seed: int,
    *,
    use_multiscale: bool = True,
) -> list[Path]:
    """Segment raw grayscale PNGs; each input yields a mask and an overlay PNG.

    The images go through the same preprocessing as the training data.

    Returns:
        The written paths, two per input.

    Raises:
        DatasetError: If an input cannot be read.
        InvalidArgumentError: If an image size is not divisible by the
            model's size divisor.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for index, path in enumerate(paths):
        image = preprocess_image(read_image_png(path, sample_id=path.stem), preprocess)
        result = segment(
            model,
            image_tensor(image, model),
            schedule,
            sampler,
            derive_seed(seed, index),
            use_multiscale=use_multiscale,
        )
        written.extend(_write_outputs(out_dir, path.stem, image, result.mask[0, 0].numpy()))
    logger.info("Wrote %d files to %s", len(written), out_dir)
    return written
