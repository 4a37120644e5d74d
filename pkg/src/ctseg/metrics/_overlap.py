"""Overlap metrics for binary masks."""

from __future__ import annotations

import numpy as np
import numpy.typing as npt

from ctseg._exceptions import InvalidArgumentError


def _counts(pred: npt.ArrayLike, gt: npt.ArrayLike) -> tuple[int, int, int]:
    """Return (|P ∩ G|, |P|, |G|) after validating shapes and binarity."""
    p = np.asarray(pred)
    g = np.asarray(gt)
    if p.shape != g.shape:
        msg = f"Mask shape mismatch: {p.shape} vs {g.shape}"
        raise InvalidArgumentError(msg)
    for name, arr in (("pred", p), ("gt", g)):
        if not np.isin(arr, (0, 1)).all():
            msg = f"{name} must be a binary {{0, 1}} mask"
            raise InvalidArgumentError(msg)
    pb = p.astype(bool)
    gb = g.astype(bool)
    return int(np.count_nonzero(pb & gb)), int(np.count_nonzero(pb)), int(np.count_nonzero(gb))


def dice(pred: npt.ArrayLike, gt: npt.ArrayLike) -> float:
    """Dice coefficient 2|P ∩ G| / (|P| + |G|); 1.0 when both masks are empty.

    Raises:
        InvalidArgumentError: If the shapes differ or either mask is not binary.
    """
    inter, n_pred, n_gt = _counts(pred, gt)
    if n_pred + n_gt == 0:
        return 1.0
    return 2.0 * inter / (n_pred + n_gt)


def iou(pred: npt.ArrayLike, gt: npt.ArrayLike) -> float:
    """Intersection over union |P ∩ G| / |P ∪ G|; 1.0 when both masks are empty.

    Raises:
        InvalidArgumentError: If the shapes differ or either mask is not binary.
    """
    inter, n_pred, n_gt = _counts(pred, gt)
    union = n_pred + n_gt - inter
    if union == 0:
        return 1.0
    return inter / union
