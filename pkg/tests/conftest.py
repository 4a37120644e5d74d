"""Shared pytest fixtures for ctseg tests."""

from __future__ import annotations

from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest
import torch

from ctseg import (
    ArchitectureConfig,
    PreprocessConfig,
    RunConfig,
    ScheduleConfig,
    SegmentationDataset,
    SyntheticConfig,
    TrainerConfig,
    generate_synthetic_dataset,
    init_params,
    load_dataset,
)
from ctseg.networks import ConsistencySegmenter
from ctseg.training import train_loop


def make_mask(size: int, rows: slice, cols: slice) -> np.ndarray:
    """Create a {0, 1} uint8 mask with a filled rectangle.

    Args:
        size: Height and width.
        rows: Row range of the rectangle.
        cols: Column range of the rectangle.

    Returns:
        The mask.
    """
    mask = np.zeros((size, size), dtype=np.uint8)
    mask[rows, cols] = 1
    return mask


def central_difference_grads(
    module: torch.nn.Module,
    loss_fn: Callable[[], torch.Tensor],
    h: float = 1e-4,
    max_per_param: int | None = None,
) -> dict[str, tuple[torch.Tensor, torch.Tensor]]:
    """Central-difference gradient of ``loss_fn()`` w.r.t. the module parameters.

    Args:
        module: Module whose parameters are perturbed in place and restored.
        loss_fn: Scalar-valued closure over ``module``.
        h: Perturbation size.
        max_per_param: Only probe this many evenly spaced elements per tensor.

    Returns:
        Per parameter name, the probed flat indices and their numeric gradients.
    """
    grads = {}
    with torch.no_grad():
        for name, param in module.named_parameters():
            flat = param.view(-1)
            count = flat.numel() if max_per_param is None else min(max_per_param, flat.numel())
            indices = torch.linspace(0, flat.numel() - 1, count).round().long().unique()
            numeric = torch.empty(len(indices), dtype=param.dtype)
            for j, i in enumerate(indices.tolist()):
                original = flat[i].item()
                flat[i] = original + h
                plus = loss_fn().item()
                flat[i] = original - h
                minus = loss_fn().item()
                flat[i] = original
                numeric[j] = (plus - minus) / (2 * h)
            grads[name] = (indices, numeric)
    return grads


def relative_error(a: torch.Tensor, b: torch.Tensor) -> float:
    """Norm-wise relative difference of two gradient vectors."""
    return float((a - b).norm() / max(float(a.norm()), float(b.norm()), 1e-12))


@pytest.fixture(autouse=True)
def _no_env_seed(monkeypatch: pytest.MonkeyPatch) -> None:
    """Keep a CTS_SEED from the developer's shell out of the tests."""
    monkeypatch.delenv("CTS_SEED", raising=False)


@pytest.fixture
def tiny_arch() -> ArchitectureConfig:
    """Two-level architecture small enough for CPU unit tests."""
    return ArchitectureConfig(
        depth=2, base_channels=4, channel_mult=(1, 2), time_embed_dim=8, reduction=2
    )


@pytest.fixture
def schedule() -> ScheduleConfig:
    """Default schedule constants."""
    return ScheduleConfig()


@pytest.fixture
def tiny_run_config(tiny_arch: ArchitectureConfig) -> RunConfig:
    """Run configuration for ten quick training steps."""
    return RunConfig(
        schedule=ScheduleConfig(total_train_steps=10),
        arch=tiny_arch,
        train=TrainerConfig(
            batch_size=2,
            total_train_steps=10,
            eval_interval=0,
            checkpoint_interval=5,
            log_interval=0,
            seed=3,
        ),
        preprocess=PreprocessConfig(n_iter=1),
    )


@pytest.fixture
def tiny_model(tiny_arch: ArchitectureConfig) -> ConsistencySegmenter:
    """Tiny model with a trainable (non-zero) output layer."""
    return init_params(tiny_arch, seed=0, zero_init_output=False)


@pytest.fixture
def synthetic_config() -> SyntheticConfig:
    """Small synthetic dataset settings."""
    return SyntheticConfig(image_size=16, n_train=6, n_val=3, n_test=2, seed=11)


@pytest.fixture
def dataset_dir(tmp_path: Path, synthetic_config: SyntheticConfig) -> Path:
    """Directory holding a freshly generated synthetic dataset."""
    root = tmp_path / "data"
    generate_synthetic_dataset(synthetic_config, root)
    return root


@pytest.fixture
def dataset(dataset_dir: Path, tiny_run_config: RunConfig) -> SegmentationDataset:
    """The synthetic dataset loaded with the tiny run's preprocessing."""
    return load_dataset(dataset_dir, tiny_run_config.preprocess)


@pytest.fixture
def image_batch() -> torch.Tensor:
    """Two random 16x16 normalized images."""
    generator = torch.Generator().manual_seed(5)
    return torch.rand((2, 1, 16, 16), generator=generator) * 2 - 1


@pytest.fixture
def config_file(tmp_path: Path, tiny_run_config: RunConfig) -> Path:
    """Flat JSON file holding the tiny run configuration."""
    path = tmp_path / "tiny.json"
    path.write_text(tiny_run_config.to_json())
    return path


@pytest.fixture
def trained_run(
    tmp_path: Path, tiny_run_config: RunConfig, dataset: SegmentationDataset
) -> Path:
    """Run directory of a completed ten-step tiny training run."""
    run = tmp_path / "run"
    train_loop(tiny_run_config, dataset, run)
    return run
