"""Exception hierarchy for ctseg.

All ctseg-specific exceptions inherit from CTSError for easy catching.
"""

from __future__ import annotations

from pathlib import Path


class CTSError(Exception):
    """Base exception for all ctseg errors.

    Catch this to handle any ctseg-related error.
    """


class InvalidArgumentError(CTSError, ValueError):
    """An argument or configuration value is outside its valid range.

    Raised for out-of-range schedule indices, shape mismatches, non-binary
    masks, malformed noise-level lists and unstable filter settings.
    """


class DatasetError(CTSError):
    """A dataset on disk could not be loaded or failed validation."""

    def __init__(self, message: str, sample_id: str | None = None) -> None:
        """Initialize with the offending sample.

        Args:
            message: Error message.
            sample_id: Identifier of the sample that failed, if known.
        """
        super().__init__(message)
        self.sample_id = sample_id


class CheckpointError(CTSError):
    """A checkpoint is missing, corrupt, from another format version or another config."""

    def __init__(self, message: str, path: Path | str | None = None) -> None:
        """Initialize with the checkpoint location.

        Args:
            message: Error message.
            path: Checkpoint directory or file involved.
        """
        super().__init__(message)
        self.path = Path(path) if path is not None else None


class NumericalError(CTSError):
    """Training produced a non-finite loss and was aborted."""

    def __init__(self, step: int, l_ct: float, l_s: float) -> None:
        """Initialize with the step and the component losses.

        Args:
            step: Training step index at which the loss went non-finite.
            l_ct: Consistency loss value at that step.
            l_s: Segmentation loss value at that step.
        """
        super().__init__(f"Non-finite loss at step {step}: l_ct={l_ct!r}, l_s={l_s!r}")
        self.step = step
        self.l_ct = l_ct
        self.l_s = l_s
