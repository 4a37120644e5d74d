"""Segmentation datasets: synthetic generation, loading and batching."""

from ctseg._config import SyntheticConfig
from ctseg.data._dataset import SegmentationDataset, iterate_batches, load_dataset, stack_pairs
from ctseg.data._synthetic import MANIFEST_NAME, generate_sample, generate_synthetic_dataset
from ctseg.data._types import (
    FORMAT_VERSION,
    SPLITS,
    Batch,
    DatasetManifest,
    ManifestEntry,
    SamplePair,
)

__all__ = [
    "FORMAT_VERSION",
    "MANIFEST_NAME",
    "SPLITS",
    "Batch",
    "DatasetManifest",
    "ManifestEntry",
    "SamplePair",
    "SegmentationDataset",
    "SyntheticConfig",
    "generate_sample",
    "generate_synthetic_dataset",
    "iterate_batches",
    "load_dataset",
    "stack_pairs",
]
