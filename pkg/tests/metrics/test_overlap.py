"""Tests for Dice and IoU."""

from __future__ import annotations

import numpy as np
import pytest

from conftest import make_mask

from ctseg import InvalidArgumentError
from ctseg.metrics import dice, iou


def brute_force(pred: np.ndarray, gt: np.ndarray) -> tuple[float, float]:
    """Pixel-by-pixel Dice and IoU."""
    inter = union = n_pred = n_gt = 0
    for p, g in zip(pred.ravel().tolist(), gt.ravel().tolist(), strict=True):
        inter += p and g
        union += p or g
        n_pred += p
        n_gt += g
    if union == 0:
        return 1.0, 1.0
    return 2 * inter / (n_pred + n_gt), inter / union


class TestOverlap:
    """Tests for dice and iou."""

    def test_half_containment(self) -> None:
        """A prediction covering half of the ground truth scores 2/3 and 1/2."""
        gt = make_mask(8, slice(0, 4), slice(0, 4))
        pred = make_mask(8, slice(0, 2), slice(0, 4))
        assert dice(pred, gt) == pytest.approx(2 / 3)
        assert iou(pred, gt) == pytest.approx(1 / 2)

    def test_identical(self) -> None:
        """A perfect prediction scores 1."""
        gt = make_mask(8, slice(1, 5), slice(2, 7))
        assert dice(gt, gt) == 1.0
        assert iou(gt, gt) == 1.0

    def test_disjoint(self) -> None:
        """Disjoint masks score 0."""
        a = make_mask(8, slice(0, 2), slice(0, 2))
        b = make_mask(8, slice(5, 8), slice(5, 8))
        assert dice(a, b) == 0.0
        assert iou(a, b) == 0.0

    def test_both_empty(self) -> None:
        """Two empty masks agree perfectly."""
        empty = np.zeros((8, 8), dtype=np.uint8)
        assert dice(empty, empty) == 1.0
        assert iou(empty, empty) == 1.0

    def test_empty_prediction(self) -> None:
        """Missing a non-empty ground truth scores 0."""
        gt = make_mask(8, slice(0, 4), slice(0, 4))
        assert dice(np.zeros_like(gt), gt) == 0.0

    def test_random_pairs(self) -> None:
        """Random masks should satisfy dice = 2iou / (1 + iou) and match a brute-force count."""
        rng = np.random.default_rng(0)
        for _ in range(1000):
            pred = (rng.random((8, 8)) < rng.random()).astype(np.uint8)
            gt = (rng.random((8, 8)) < rng.random()).astype(np.uint8)
            d, j = dice(pred, gt), iou(pred, gt)
            assert 0.0 <= j <= d <= 1.0
            assert d == pytest.approx(2 * j / (1 + j))
            assert (d, j) == pytest.approx(brute_force(pred, gt))

    def test_accepts_bool(self) -> None:
        """Boolean masks are binary too."""
        gt = make_mask(8, slice(0, 4), slice(0, 4)).astype(bool)
        assert dice(gt, gt) == 1.0

    def test_shape_mismatch(self) -> None:
        """Masks must share a shape."""
        with pytest.raises(InvalidArgumentError, match="shape mismatch"):
            dice(np.zeros((8, 8)), np.zeros((4, 4)))

    def test_non_binary(self) -> None:
        """Values other than 0 and 1 are rejected."""
        gt = make_mask(8, slice(0, 4), slice(0, 4))
        with pytest.raises(InvalidArgumentError, match="pred must be a binary"):
            iou(gt * 255, gt)
