"""Single-step and multistep consistency segmentation."""

from __future__ import annotations

import math
from collections.abc import Sequence
from typing import NamedTuple

import numpy as np
import torch

from ctseg._config import SamplerConfig, ScheduleConfig
from ctseg._exceptions import InvalidArgumentError
from ctseg._types import ImageGrid
from ctseg.networks import ConsistencySegmenter, consistency_forward
from ctseg.preprocessing import binarize, decode_mask
from ctseg.schedules import karras_sigmas


class SegmentationResult(NamedTuple):
    """Output of a sampler.

    Attributes:
        probabilities: Foreground probabilities in [0, 1], shape (B, 1, H, W).
        mask: Binary {0, 1} uint8 mask, same shape.
    """

    probabilities: torch.Tensor
    mask: torch.Tensor


def derive_seed(seed: int, index: int) -> int:
    """Per-sample seed derived from a master seed and a sample index."""
    if seed < 0 or index < 0:
        msg = f"seed and index must be >= 0, got seed={seed}, index={index}"
        raise InvalidArgumentError(msg)
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def image_tensor(image: ImageGrid, model: ConsistencySegmenter) -> torch.Tensor:
    """Wrap an (H, W) image as a (1, 1, H, W) tensor in the model's dtype."""
    dtype = next(model.parameters()).dtype
    return torch.as_tensor(image, dtype=dtype)[None, None]


def multistep_sigmas(m: int, cfg: ScheduleConfig) -> list[float]:
    """The m largest levels of ``karras_sigmas(m + 1)``, highest first.

    ``multistep_sigmas(1)`` is ``[sigma_max]``.

    Raises:
        InvalidArgumentError: If ``m < 1``.
    """
    if m < 1:
        msg = f"Number of sampling steps must be >= 1, got {m}"
        raise InvalidArgumentError(msg)
    return karras_sigmas(m + 1, cfg)[1:][::-1]


def _validate_sigmas(sigmas: Sequence[float], cfg: ScheduleConfig) -> None:
    if not sigmas:
        msg = "sigma_subset must not be empty"
        raise InvalidArgumentError(msg)
    if sigmas[0] != cfg.sigma_max:
        msg = f"sigma_subset must start at sigma_max={cfg.sigma_max}, got {sigmas[0]}"
        raise InvalidArgumentError(msg)
    if any(b >= a for a, b in zip(sigmas, sigmas[1:], strict=False)):
        msg = "sigma_subset must be strictly decreasing"
        raise InvalidArgumentError(msg)
    if sigmas[-1] < cfg.sigma_min:
        msg = f"sigma_subset must stay >= sigma_min={cfg.sigma_min}, got {sigmas[-1]}"
        raise InvalidArgumentError(msg)


def segment_multistep(
    model: ConsistencySegmenter,
    x_d: torch.Tensor,
    sigma_subset: Sequence[float],
    cfg: ScheduleConfig,
    seed: int,
    *,
    threshold: float = 0.5,
    use_multiscale: bool = True,
) -> SegmentationResult:
    """Segment with one consistency evaluation per noise level.

    Starts from x = T·z, then alternates y = f(x, t_i) and
    x = y + sqrt(t_{i+1}² - ε²)·z'.

    Args:
        model: Model whose parameters are used (typically the EMA target).
        x_d: Normalized images, shape (B, 1, H, W).
        sigma_subset: Noise levels starting at T, strictly decreasing, >= ε.
        cfg: Schedule constants.
        seed: Seed of the noise draws.
        threshold: Binarization threshold.
        use_multiscale: Fuse the condition pyramid (False for CTS-nM models).

    Returns:
        Probability map and binary mask.

    Raises:
        InvalidArgumentError: If ``sigma_subset`` is malformed.
    """
    _validate_sigmas(sigma_subset, cfg)
    generator = torch.Generator().manual_seed(seed)
    model.eval()
    with torch.no_grad():
        x = cfg.sigma_max * torch.randn(x_d.shape, generator=generator, dtype=x_d.dtype)
        y = x
        for i, t in enumerate(sigma_subset):
            y = consistency_forward(model, x, x_d, t, cfg, use_multiscale=use_multiscale).y
            if i + 1 < len(sigma_subset):
                noise = torch.randn(x_d.shape, generator=generator, dtype=x_d.dtype)
                x = y + math.sqrt(sigma_subset[i + 1] ** 2 - cfg.sigma_min**2) * noise
    probabilities = decode_mask(y)
    return SegmentationResult(probabilities, binarize(probabilities, threshold))


def segment_single_step(
    model: ConsistencySegmenter,
    x_d: torch.Tensor,
    cfg: ScheduleConfig,
    seed: int,
    *,
    threshold: float = 0.5,
    use_multiscale: bool = True,
) -> SegmentationResult:
    """Segment with exactly one denoiser evaluation at t = T."""
    return segment_multistep(
        model,
        x_d,
        [cfg.sigma_max],
        cfg,
        seed,
        threshold=threshold,
        use_multiscale=use_multiscale,
    )


def segment(
    model: ConsistencySegmenter,
    x_d: torch.Tensor,
    schedule: ScheduleConfig,
    sampler: SamplerConfig,
    seed: int,
    *,
    use_multiscale: bool = True,
) -> SegmentationResult:
    """Dispatch to the single-step or multistep sampler per ``sampler.steps``."""
    if sampler.steps == 1:
        return segment_single_step(
            model,
            x_d,
            schedule,
            seed,
            threshold=sampler.threshold,
            use_multiscale=use_multiscale,
        )
    return segment_multistep(
        model,
        x_d,
        multistep_sigmas(sampler.steps, schedule),
        schedule,
        seed,
        threshold=sampler.threshold,
        use_multiscale=use_multiscale,
    )
