"""Synthetic segmentation datasets.

Each image holds one or more random foreground shapes with a softened
boundary, a smooth bias field, multiplicative speckle and additive Gaussian
noise. The mask is the exact union of the generating shapes. Every sample
draws from its own generator seeded by (master seed, split, index), so output
is a pure function of the configuration.
"""

from __future__ import annotations

import dataclasses
import json
import logging
from pathlib import Path
from typing import Final

import numpy as np
from scipy.ndimage import gaussian_filter

from ctseg._config import SyntheticConfig
from ctseg._exceptions import CTSError
from ctseg._types import ImageGrid, MaskGrid
from ctseg.data._types import FORMAT_VERSION, SPLITS, DatasetManifest, ManifestEntry
from ctseg.preprocessing import write_image_png, write_mask_png

logger = logging.getLogger(__name__)

MANIFEST_NAME: Final[str] = "manifest.json"
MIN_FOREGROUND_FRACTION: Final[float] = 0.02
MAX_FOREGROUND_FRACTION: Final[float] = 0.5
MAX_SHAPE_ATTEMPTS: Final[int] = 1000


def _grid(size: int) -> tuple[ImageGrid, ImageGrid]:
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    return yy + 0.5, xx + 0.5


def _ellipse(rng: np.random.Generator, size: int) -> MaskGrid:
    yy, xx = _grid(size)
    cy, cx = rng.uniform(0.2 * size, 0.8 * size, size=2)
    a, b = rng.uniform(0.08 * size, 0.3 * size, size=2)
    angle = rng.uniform(0.0, np.pi)
    cos, sin = np.cos(angle), np.sin(angle)
    u = (xx - cx) * cos + (yy - cy) * sin
    v = -(xx - cx) * sin + (yy - cy) * cos
    return ((u / a) ** 2 + (v / b) ** 2 <= 1.0).astype(np.uint8)


def _blob(rng: np.random.Generator, size: int) -> MaskGrid:
    """Star-shaped region whose radius is a smooth low-order Fourier series of the angle."""
    yy, xx = _grid(size)
    cy, cx = rng.uniform(0.25 * size, 0.75 * size, size=2)
    r0 = rng.uniform(0.1 * size, 0.28 * size)
    dy, dx = yy - cy, xx - cx
    phi = np.arctan2(dy, dx)
    radius = np.ones_like(phi)
    for k in (2, 3, 4):
        radius += rng.uniform(0.0, 0.15) * np.cos(k * phi + rng.uniform(0.0, 2 * np.pi))
    return (np.hypot(dy, dx) <= r0 * radius).astype(np.uint8)


def _draw_mask(rng: np.random.Generator, cfg: SyntheticConfig) -> MaskGrid:
    for _ in range(MAX_SHAPE_ATTEMPTS):
        mask = np.zeros((cfg.image_size, cfg.image_size), dtype=np.uint8)
        for _ in range(int(rng.integers(1, cfg.max_shapes + 1))):
            family = cfg.shape_family
            if family == "mixed":
                family = "ellipse" if rng.random() < 0.5 else "blob"
            draw = _ellipse if family == "ellipse" else _blob
            mask |= draw(rng, cfg.image_size)
        fraction = float(mask.mean())
        if MIN_FOREGROUND_FRACTION <= fraction <= MAX_FOREGROUND_FRACTION:
            return mask
    msg = (
        "Could not draw a mask with foreground fraction in "
        f"[{MIN_FOREGROUND_FRACTION}, {MAX_FOREGROUND_FRACTION}]"
    )
    raise CTSError(msg)


def _render_image(rng: np.random.Generator, mask: MaskGrid, cfg: SyntheticConfig) -> ImageGrid:
    """Render the 0-255 intensity image for ``mask``."""
    soft = mask.astype(np.float64)
    if cfg.boundary_blur > 0:
        soft = gaussian_filter(soft, sigma=cfg.boundary_blur, mode="nearest")
    image = cfg.background_intensity + (cfg.foreground_intensity - cfg.background_intensity) * soft

    yy, xx = _grid(cfg.image_size)
    u = 2.0 * xx / cfg.image_size - 1.0
    v = 2.0 * yy / cfg.image_size - 1.0
    gx, gy, curvature = rng.uniform(-1.0, 1.0, size=3)
    bias = cfg.bias_field_strength * (gx * u + gy * v + curvature * (u**2 + v**2) / 2.0)
    image = image * (1.0 + bias)

    image = image * (1.0 + cfg.speckle_strength * rng.standard_normal(image.shape))
    image = image + cfg.gaussian_noise_std * rng.standard_normal(image.shape)
    return np.clip(image, 0.0, 1.0) * 255.0


def generate_sample(
    cfg: SyntheticConfig, split_index: int, index: int
) -> tuple[ImageGrid, MaskGrid]:
    """Generate one (raw image, mask) pair from its derived seed.

    Args:
        cfg: Generator configuration.
        split_index: Position of the split in ``SPLITS``.
        index: Sample index within the split.

    Returns:
        The 0-255 scaled image and the {0, 1} mask.
    """
    rng = np.random.default_rng([cfg.seed or 0, split_index, index])
    mask = _draw_mask(rng, cfg)
    return _render_image(rng, mask, cfg), mask


def generate_synthetic_dataset(cfg: SyntheticConfig, out_dir: Path) -> DatasetManifest:
    """Write a synthetic dataset and its manifest under ``out_dir``.

    Layout: ``<out_dir>/{train,val,test}/{images,masks}/<id>.png`` plus
    ``<out_dir>/manifest.json``.

    Args:
        cfg: Generator configuration; the seed fixes every byte written.
        out_dir: Destination directory, created if needed.

    Returns:
        The manifest that was written.

    Raises:
        OSError: If the directory or files cannot be written.
    """
    splits: dict[str, tuple[ManifestEntry, ...]] = {}
    for split_index, split in enumerate(SPLITS):
        image_dir = out_dir / split / "images"
        mask_dir = out_dir / split / "masks"
        image_dir.mkdir(parents=True, exist_ok=True)
        mask_dir.mkdir(parents=True, exist_ok=True)
        entries = []
        for index in range(cfg.split_sizes[split]):
            sample_id = f"{split}-{index:05d}"
            image, mask = generate_sample(cfg, split_index, index)
            write_image_png(image_dir / f"{sample_id}.png", image)
            write_mask_png(mask_dir / f"{sample_id}.png", mask)
            entries.append(
                ManifestEntry(
                    id=sample_id,
                    image=f"{split}/images/{sample_id}.png",
                    mask=f"{split}/masks/{sample_id}.png",
                )
            )
        splits[split] = tuple(entries)
        logger.info("Wrote %d %s samples to %s", len(entries), split, out_dir / split)

    manifest = DatasetManifest(
        format_version=FORMAT_VERSION,
        splits=splits,
        generator=dataclasses.asdict(cfg),
    )
    text = json.dumps(manifest.to_dict(), indent=2) + "\n"
    (out_dir / MANIFEST_NAME).write_text(text, encoding="utf-8")
    return manifest
