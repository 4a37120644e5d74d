"""Tests for mask value coding."""

from __future__ import annotations

import pytest
import torch

from ctseg import InvalidArgumentError
from ctseg.preprocessing import binarize, decode_mask, encode_mask, is_binary


class TestEncodeDecode:
    """Tests for encode_mask and decode_mask."""

    def test_encode_values(self) -> None:
        """0 should map to -1 and 1 to +1."""
        mask = torch.tensor([[0, 1], [1, 0]], dtype=torch.uint8)
        assert encode_mask(mask).tolist() == [[-1.0, 1.0], [1.0, -1.0]]

    def test_encode_rejects_non_binary(self) -> None:
        """Values other than 0 and 1 should be rejected."""
        with pytest.raises(InvalidArgumentError, match="binary"):
            encode_mask(torch.tensor([0.0, 0.5, 1.0]))

    def test_decode_clips(self) -> None:
        """Decoded values should be clipped to [0, 1]."""
        out = decode_mask(torch.tensor([-3.0, -1.0, 0.0, 1.0, 2.5]))
        assert out.tolist() == [0.0, 0.0, 0.5, 1.0, 1.0]

    def test_decode_inverts_encode(self) -> None:
        """Decoding an encoded mask should give the mask back."""
        mask = (torch.rand(4, 4, generator=torch.Generator().manual_seed(1)) > 0.5).float()
        torch.testing.assert_close(decode_mask(encode_mask(mask)), mask)


class TestBinarize:
    """Tests for binarize and is_binary."""

    def test_threshold_inclusive(self) -> None:
        """Probabilities at the threshold should count as foreground."""
        out = binarize(torch.tensor([0.2, 0.5, 0.7]))
        assert out.dtype == torch.uint8
        assert out.tolist() == [0, 1, 1]

    def test_custom_threshold(self) -> None:
        """A higher threshold should drop weaker foreground."""
        assert binarize(torch.tensor([0.6, 0.9]), threshold=0.8).tolist() == [0, 1]

    @pytest.mark.parametrize("threshold", [0.0, 1.0, -0.1])
    def test_invalid_threshold(self, threshold: float) -> None:
        """Thresholds outside (0, 1) should be rejected."""
        with pytest.raises(InvalidArgumentError, match="threshold"):
            binarize(torch.tensor([0.5]), threshold=threshold)

    def test_is_binary(self) -> None:
        """is_binary should accept only exact 0 and 1 values."""
        assert is_binary(torch.tensor([0.0, 1.0, 1.0]))
        assert not is_binary(torch.tensor([0.0, 1.0, 2.0]))
