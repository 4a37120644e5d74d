"""Loading datasets from disk and iterating over seeded batches."""

from __future__ import annotations

import json
import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np
import torch

from ctseg._config import PreprocessConfig
from ctseg._exceptions import DatasetError, InvalidArgumentError
from ctseg.data._synthetic import MANIFEST_NAME
from ctseg.data._types import FORMAT_VERSION, Batch, DatasetManifest, SamplePair
from ctseg.preprocessing import encode_mask, preprocess_image, read_image_png, read_mask_png

logger = logging.getLogger(__name__)


class SegmentationDataset:
    """Read-only, fully loaded segmentation dataset.

    Every pair has been preprocessed and validated; the handle can be shared
    between threads once constructed.
    """

    def __init__(
        self,
        root: Path,
        manifest: DatasetManifest,
        splits: dict[str, tuple[SamplePair, ...]],
    ) -> None:
        """Initialize from already-validated contents.

        Args:
            root: Dataset root directory.
            manifest: Parsed manifest.
            splits: Loaded pairs per split, in manifest order.
        """
        self._root = root
        self._manifest = manifest
        self._splits = splits

    @property
    def root(self) -> Path:
        """Dataset root directory."""
        return self._root

    @property
    def manifest(self) -> DatasetManifest:
        """The parsed manifest."""
        return self._manifest

    @property
    def split_names(self) -> tuple[str, ...]:
        """Names of the available splits."""
        return tuple(self._splits)

    def split(self, name: str) -> tuple[SamplePair, ...]:
        """Return the pairs of split ``name`` in manifest order.

        Raises:
            InvalidArgumentError: If the split does not exist.
        """
        if name not in self._splits:
            msg = f"Unknown split {name!r}; available: {', '.join(self._splits)}"
            raise InvalidArgumentError(msg)
        return self._splits[name]

    def __len__(self) -> int:
        return sum(len(pairs) for pairs in self._splits.values())


def _read_manifest(root: Path) -> DatasetManifest:
    path = root / MANIFEST_NAME
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        msg = f"No {MANIFEST_NAME} in {root}"
        raise DatasetError(msg) from e
    except (OSError, ValueError) as e:
        msg = f"Unreadable manifest {path}: {e}"
        raise DatasetError(msg) from e
    if not isinstance(data, dict):
        msg = f"Manifest {path} must contain a JSON object"
        raise DatasetError(msg)
    try:
        manifest = DatasetManifest.from_dict(data)
    except (KeyError, TypeError, ValueError) as e:
        msg = f"Malformed manifest {path}: {e}"
        raise DatasetError(msg) from e
    if manifest.format_version != FORMAT_VERSION:
        msg = (
            f"Unsupported manifest format_version {manifest.format_version} "
            f"(expected {FORMAT_VERSION})"
        )
        raise DatasetError(msg)
    return manifest


def load_dataset(root: Path, preprocess: PreprocessConfig | None = None) -> SegmentationDataset:
    """Load and validate a dataset written by ``generate_synthetic_dataset``.

    Images go through ``preprocess_image``; masks must be {0, 255} PNGs with
    the same shape as their image.

    Args:
        root: Dataset root containing ``manifest.json``.
        preprocess: Preprocessing settings; defaults apply when None.

    Returns:
        The loaded dataset.

    Raises:
        DatasetError: On a missing or incompatible manifest, duplicate ids, a
            missing or corrupt PNG, a non-binary mask or a shape mismatch.
            The offending sample id is named in the message.
    """
    preprocess = preprocess or PreprocessConfig()
    manifest = _read_manifest(root)
    seen: set[str] = set()
    splits: dict[str, tuple[SamplePair, ...]] = {}
    for name, entries in manifest.splits.items():
        pairs = []
        for entry in entries:
            if entry.id in seen:
                msg = f"Duplicate sample id {entry.id!r} in manifest"
                raise DatasetError(msg, sample_id=entry.id)
            seen.add(entry.id)
            raw = read_image_png(root / entry.image, sample_id=entry.id)
            mask = read_mask_png(root / entry.mask, sample_id=entry.id)
            if raw.shape != mask.shape:
                msg = f"Sample {entry.id!r}: image shape {raw.shape} != mask shape {mask.shape}"
                raise DatasetError(msg, sample_id=entry.id)
            image = preprocess_image(raw, preprocess)
            pairs.append(SamplePair(image=image, mask=mask, id=entry.id))
        splits[name] = tuple(pairs)
    logger.info("Loaded dataset %s: %s", root, manifest.split_sizes)
    return SegmentationDataset(root, manifest, splits)


def stack_pairs(pairs: Sequence[SamplePair]) -> Batch:
    """Stack pairs into a Batch of float32 tensors shaped (B, 1, H, W)."""
    images = torch.from_numpy(np.stack([p.image for p in pairs])).float().unsqueeze(1)
    labels = torch.from_numpy(np.stack([p.mask for p in pairs])).float().unsqueeze(1)
    return Batch(
        images=images,
        masks=encode_mask(labels),
        labels=labels,
        ids=tuple(p.id for p in pairs),
    )


def iterate_batches(
    dataset: SegmentationDataset,
    split: str,
    batch_size: int,
    epoch_seed: int,
) -> list[Batch]:
    """Shuffle a split with ``epoch_seed`` and cut it into batches.

    The final partial batch is kept, so the batches partition the split.

    Raises:
        InvalidArgumentError: If ``batch_size < 1`` or the split is empty or unknown.
    """
    if batch_size < 1:
        msg = f"batch_size must be >= 1, got {batch_size}"
        raise InvalidArgumentError(msg)
    pairs = dataset.split(split)
    if not pairs:
        msg = f"Split {split!r} is empty"
        raise InvalidArgumentError(msg)
    generator = torch.Generator().manual_seed(epoch_seed)
    order = torch.randperm(len(pairs), generator=generator).tolist()
    return [
        stack_pairs([pairs[i] for i in order[start : start + batch_size]])
        for start in range(0, len(order), batch_size)
    ]
