"""Dataset type definitions for ctseg.

Dataclasses for samples, batches and the on-disk manifest.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Final

import torch

from ctseg._types import ImageGrid, MaskGrid

#: Manifest format written by this version of ctseg.
FORMAT_VERSION: Final[int] = 1

#: Split names in generation order.
SPLITS: Final[tuple[str, ...]] = ("train", "val", "test")


@dataclass(frozen=True, slots=True, eq=False)
class SamplePair:
    """One image with its binary mask.

    Attributes:
        image: Normalized image in [-1, 1], shape (H, W).
        mask: Binary {0, 1} mask, shape (H, W).
        id: Sample identifier, unique within the dataset.
    """

    image: ImageGrid
    mask: MaskGrid
    id: str


@dataclass(frozen=True, slots=True)
class ManifestEntry:
    """Location of one sample relative to the dataset root.

    Attributes:
        id: Sample identifier.
        image: Relative path of the image PNG.
        mask: Relative path of the mask PNG.
    """

    id: str
    image: str
    mask: str

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ManifestEntry:
        """Create from a manifest JSON object.

        Args:
            data: Mapping with ``id``, ``image`` and ``mask`` keys.

        Returns:
            A ManifestEntry instance.
        """
        return cls(id=str(data["id"]), image=str(data["image"]), mask=str(data["mask"]))

    def to_dict(self) -> dict[str, str]:
        """Return the JSON form."""
        return {"id": self.id, "image": self.image, "mask": self.mask}


@dataclass(frozen=True, slots=True)
class DatasetManifest:
    """Contents of ``manifest.json``.

    Attributes:
        format_version: Manifest format version.
        splits: Ordered entries per split name.
        generator: Echo of the generator configuration.
    """

    format_version: int
    splits: dict[str, tuple[ManifestEntry, ...]]
    generator: dict[str, Any] = field(default_factory=dict)

    @property
    def split_sizes(self) -> dict[str, int]:
        """Number of samples per split."""
        return {name: len(entries) for name, entries in self.splits.items()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> DatasetManifest:
        """Create from parsed ``manifest.json`` data.

        Args:
            data: The decoded JSON object.

        Returns:
            A DatasetManifest instance.
        """
        raw = data.get("splits", {})
        # Known splits come first in generation order, others keep file order.
        names = [s for s in SPLITS if s in raw] + [s for s in raw if s not in SPLITS]
        splits = {name: tuple(ManifestEntry.from_dict(e) for e in raw[name]) for name in names}
        return cls(
            format_version=int(data.get("format_version", -1)),
            splits=splits,
            generator=dict(data.get("generator", {})),
        )

    def to_dict(self) -> dict[str, Any]:
        """Return the JSON form."""
        return {
            "format_version": self.format_version,
            "split_sizes": self.split_sizes,
            "splits": {
                name: [e.to_dict() for e in entries] for name, entries in self.splits.items()
            },
            "generator": self.generator,
        }


@dataclass(frozen=True, slots=True, eq=False)
class Batch:
    """A stacked group of samples ready for the networks.

    Attributes:
        images: Normalized images, shape (B, 1, H, W).
        masks: Masks encoded to {-1, +1}, shape (B, 1, H, W).
        labels: Masks in {0, 1} label space, shape (B, 1, H, W).
        ids: Sample identifiers in batch order.
    """

    images: torch.Tensor
    masks: torch.Tensor
    labels: torch.Tensor
    ids: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.ids)
