"""Shared array aliases for ctseg.

Single images travel as 2-D float64 numpy arrays; batches travel as
``(B, 1, H, W)`` float32 torch tensors.
"""

from __future__ import annotations

from typing import TypeAlias

import numpy as np
import numpy.typing as npt

#: Grayscale image, shape ``(H, W)``; raw intensities or normalized to [-1, 1].
ImageGrid: TypeAlias = npt.NDArray[np.float64]

#: Binary label mask, shape ``(H, W)``, values in {0, 1}.
MaskGrid: TypeAlias = npt.NDArray[np.uint8]
