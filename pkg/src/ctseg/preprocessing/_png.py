"""PNG reading and writing for images, masks and overlays.

Images are 8-bit or 16-bit grayscale and are returned on a 0-255 float scale
so filter thresholds mean the same thing for both bit depths. Masks are
8-bit PNGs holding only 0 and 255.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Final

import numpy as np
import numpy.typing as npt
from PIL import Image, UnidentifiedImageError
from scipy.ndimage import binary_erosion

from ctseg._exceptions import DatasetError
from ctseg._types import ImageGrid, MaskGrid

logger = logging.getLogger(__name__)

MASK_FOREGROUND: Final[int] = 255
OVERLAY_COLOR: Final[tuple[int, int, int]] = (255, 0, 0)

_SIXTEEN_BIT_MODES: Final[frozenset[str]] = frozenset({"I;16", "I;16B", "I;16L", "I"})


def _open(path: Path, sample_id: str | None) -> Image.Image:
    try:
        with Image.open(path) as handle:
            handle.load()
            return handle.copy()
    except FileNotFoundError as e:
        msg = f"Missing file {path}" + (f" for sample {sample_id!r}" if sample_id else "")
        raise DatasetError(msg, sample_id=sample_id) from e
    except (UnidentifiedImageError, OSError) as e:
        msg = f"Corrupt PNG {path}" + (f" for sample {sample_id!r}" if sample_id else "")
        raise DatasetError(msg, sample_id=sample_id) from e


def read_image_png(path: Path, sample_id: str | None = None) -> ImageGrid:
    """Read a grayscale PNG as float64 on a 0-255 scale.

    Raises:
        DatasetError: If the file is missing, corrupt or not grayscale.
    """
    image = _open(path, sample_id)
    if image.mode in _SIXTEEN_BIT_MODES:
        return np.asarray(image, dtype=np.float64) / 257.0
    if image.mode != "L":
        msg = f"Expected a grayscale PNG at {path}, got mode {image.mode}"
        raise DatasetError(msg, sample_id=sample_id)
    return np.asarray(image, dtype=np.float64)


def read_mask_png(path: Path, sample_id: str | None = None) -> MaskGrid:
    """Read a {0, 255} mask PNG as a {0, 1} uint8 array.

    Raises:
        DatasetError: If the file is missing, corrupt or holds other values.
    """
    image = _open(path, sample_id)
    if image.mode != "L":
        msg = f"Expected an 8-bit mask PNG at {path}, got mode {image.mode}"
        raise DatasetError(msg, sample_id=sample_id)
    values = np.asarray(image, dtype=np.uint8)
    if not np.isin(values, (0, MASK_FOREGROUND)).all():
        bad = sorted(set(np.unique(values).tolist()) - {0, MASK_FOREGROUND})
        msg = f"Mask for sample {sample_id!r} is not binary: found values {bad[:5]}"
        raise DatasetError(msg, sample_id=sample_id)
    return (values == MASK_FOREGROUND).astype(np.uint8)


def write_image_png(path: Path, image: ImageGrid) -> None:
    """Write a 0-255 scaled image as an 8-bit grayscale PNG (values are rounded and clipped)."""
    data = np.clip(np.rint(image), 0, 255).astype(np.uint8)
    Image.fromarray(data).save(path, format="PNG")


def write_mask_png(path: Path, mask: MaskGrid) -> None:
    """Write a {0, 1} mask as an 8-bit PNG holding {0, 255}."""
    data = (np.asarray(mask) > 0).astype(np.uint8) * MASK_FOREGROUND
    Image.fromarray(data).save(path, format="PNG")


def mask_contour(mask: MaskGrid) -> npt.NDArray[np.bool_]:
    """Foreground pixels that touch the background (3x3 neighbourhood)."""
    fg = np.asarray(mask) > 0
    structure = np.ones((3, 3), dtype=bool)
    return np.logical_xor(fg, binary_erosion(fg, structure=structure, border_value=0))


def write_overlay_png(path: Path, image: ImageGrid, mask: MaskGrid) -> None:
    """Draw the contour of ``mask`` in red over a normalized [-1, 1] image."""
    gray = np.clip(np.rint((np.asarray(image) + 1.0) * 127.5), 0, 255).astype(np.uint8)
    rgb = np.repeat(gray[..., None], 3, axis=-1)
    contour = mask_contour(mask)
    rgb[contour] = OVERLAY_COLOR
    if not contour.any():
        logger.debug("Empty mask for overlay %s", path.name)
    Image.fromarray(rgb).save(path, format="PNG")
