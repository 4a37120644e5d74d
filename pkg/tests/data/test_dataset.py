"""Tests for dataset loading and batching."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np
import pytest
import torch
from PIL import Image

from ctseg import DatasetError, InvalidArgumentError
from ctseg.data import (
    MANIFEST_NAME,
    SegmentationDataset,
    iterate_batches,
    load_dataset,
    stack_pairs,
)


def edit_manifest(root: Path, **changes: Any) -> None:
    """Rewrite top-level manifest fields in place."""
    path = root / MANIFEST_NAME
    data = json.loads(path.read_text())
    data.update(changes)
    path.write_text(json.dumps(data))


class TestLoadDataset:
    """Tests for load_dataset."""

    def test_loads_all_splits(self, dataset: SegmentationDataset) -> None:
        """Every split should load in manifest order."""
        assert dataset.split_names == ("train", "val", "test")
        assert len(dataset) == 11
        assert [p.id for p in dataset.split("val")] == ["val-00000", "val-00001", "val-00002"]

    def test_manifest_keeps_generation_order(self, dataset_dir: Path) -> None:
        """The written manifest should list splits as train, val, test."""
        data = json.loads((dataset_dir / MANIFEST_NAME).read_text())
        assert list(data["splits"]) == ["train", "val", "test"]

    def test_reordered_manifest_splits(self, dataset_dir: Path) -> None:
        """Alphabetically keyed splits should still load in generation order."""
        data = json.loads((dataset_dir / MANIFEST_NAME).read_text())
        edit_manifest(dataset_dir, splits=dict(sorted(data["splits"].items())))

        loaded = load_dataset(dataset_dir)

        assert loaded.split_names == ("train", "val", "test")

    def test_images_normalized(self, dataset: SegmentationDataset) -> None:
        """Loaded images should lie in [-1, 1] and masks in {0, 1}."""
        for pair in dataset.split("train"):
            assert pair.image.shape == pair.mask.shape == (16, 16)
            assert pair.image.min() >= -1.0
            assert pair.image.max() <= 1.0
            assert set(np.unique(pair.mask).tolist()) <= {0, 1}

    def test_unknown_split(self, dataset: SegmentationDataset) -> None:
        """Asking for a missing split should fail."""
        with pytest.raises(InvalidArgumentError, match="Unknown split"):
            dataset.split("holdout")

    def test_missing_manifest(self, tmp_path: Path) -> None:
        """A directory without a manifest is not a dataset."""
        with pytest.raises(DatasetError, match=MANIFEST_NAME):
            load_dataset(tmp_path)

    def test_unsupported_version(self, dataset_dir: Path) -> None:
        """Other manifest format versions should be refused."""
        edit_manifest(dataset_dir, format_version=99)
        with pytest.raises(DatasetError, match="format_version 99"):
            load_dataset(dataset_dir)

    def test_malformed_manifest(self, dataset_dir: Path) -> None:
        """Entries without paths should be refused."""
        edit_manifest(dataset_dir, splits={"train": [{"id": "x"}]})
        with pytest.raises(DatasetError, match="Malformed"):
            load_dataset(dataset_dir)

    def test_non_binary_mask_names_sample(self, dataset_dir: Path) -> None:
        """A mask with a gray value should fail naming its sample."""
        path = dataset_dir / "val" / "masks" / "val-00001.png"
        mask = np.asarray(Image.open(path)).copy()
        mask[0, 0] = 128
        Image.fromarray(mask).save(path)
        with pytest.raises(DatasetError, match="val-00001") as exc_info:
            load_dataset(dataset_dir)
        assert exc_info.value.sample_id == "val-00001"

    def test_missing_image_names_sample(self, dataset_dir: Path) -> None:
        """A missing image file should fail naming its sample."""
        (dataset_dir / "test" / "images" / "test-00001.png").unlink()
        with pytest.raises(DatasetError, match="test-00001"):
            load_dataset(dataset_dir)

    def test_shape_mismatch(self, dataset_dir: Path) -> None:
        """Image and mask must share a shape."""
        path = dataset_dir / "train" / "masks" / "train-00002.png"
        Image.fromarray(np.zeros((8, 8), dtype=np.uint8)).save(path)
        with pytest.raises(DatasetError, match="train-00002"):
            load_dataset(dataset_dir)

    def test_duplicate_ids(self, dataset_dir: Path) -> None:
        """Sample ids must be unique across splits."""
        data = json.loads((dataset_dir / MANIFEST_NAME).read_text())
        data["splits"]["test"][0]["id"] = "train-00000"
        (dataset_dir / MANIFEST_NAME).write_text(json.dumps(data))
        with pytest.raises(DatasetError, match="Duplicate sample id 'train-00000'"):
            load_dataset(dataset_dir)


class TestBatches:
    """Tests for stack_pairs and iterate_batches."""

    def test_stack_pairs(self, dataset: SegmentationDataset) -> None:
        """Stacked batches should be float32 (B, 1, H, W) with encoded masks."""
        batch = stack_pairs(dataset.split("val"))
        assert batch.images.shape == (3, 1, 16, 16)
        assert batch.images.dtype == torch.float32
        assert batch.ids == ("val-00000", "val-00001", "val-00002")
        torch.testing.assert_close(batch.masks, batch.labels * 2 - 1)
        assert len(batch) == 3

    def test_batches_partition_split(self, dataset: SegmentationDataset) -> None:
        """Batches should cover each sample exactly once, keeping the partial batch."""
        batches = iterate_batches(dataset, "train", batch_size=4, epoch_seed=0)
        assert [len(b) for b in batches] == [4, 2]
        ids = [i for b in batches for i in b.ids]
        assert sorted(ids) == sorted(p.id for p in dataset.split("train"))

    def test_seeded_shuffle(self, dataset: SegmentationDataset) -> None:
        """The same epoch seed should give the same order."""
        a = [b.ids for b in iterate_batches(dataset, "train", 2, epoch_seed=7)]
        b = [b.ids for b in iterate_batches(dataset, "train", 2, epoch_seed=7)]
        assert a == b

    def test_seed_changes_order(self, dataset: SegmentationDataset) -> None:
        """Some epoch seed should reorder the split."""
        orders = {
            tuple(i for b in iterate_batches(dataset, "train", 6, epoch_seed=s) for i in b.ids)
            for s in range(5)
        }
        assert len(orders) > 1

    def test_invalid_batch_size(self, dataset: SegmentationDataset) -> None:
        """batch_size must be positive."""
        with pytest.raises(InvalidArgumentError, match="batch_size"):
            iterate_batches(dataset, "train", batch_size=0, epoch_seed=0)
