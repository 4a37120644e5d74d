"""Image preprocessing and mask value coding.

Anisotropic diffusion denoising, intensity normalization, {0,1} <-> [-1,1]
mask coding, and PNG I/O for images, masks and overlays.
"""

from ctseg._config import PreprocessConfig
from ctseg.preprocessing._codec import binarize, decode_mask, encode_mask, is_binary
from ctseg.preprocessing._filters import (
    MAX_STABLE_GAMMA,
    anisotropic_diffusion,
    normalize_image,
    preprocess_image,
)
from ctseg.preprocessing._png import (
    mask_contour,
    read_image_png,
    read_mask_png,
    write_image_png,
    write_mask_png,
    write_overlay_png,
)

__all__ = [
    "MAX_STABLE_GAMMA",
    "PreprocessConfig",
    "anisotropic_diffusion",
    "binarize",
    "decode_mask",
    "encode_mask",
    "is_binary",
    "mask_contour",
    "normalize_image",
    "preprocess_image",
    "read_image_png",
    "read_mask_png",
    "write_image_png",
    "write_mask_png",
    "write_overlay_png",
]
