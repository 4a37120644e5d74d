"""Checkpoint persistence.

A checkpoint is a directory ``<run>/checkpoints/step-XXXXXXXX/`` holding a
``weights.pt`` blob (online and target parameters, AdamW moments, step and the
random-stream state) and a ``manifest.json`` describing it.
"""

from __future__ import annotations

import json
import logging
import pickle
import re
from pathlib import Path
from typing import Any, Final

import torch

from ctseg._config import RunConfig
from ctseg._exceptions import CheckpointError, CTSError
from ctseg.networks import init_params
from ctseg.training._step import make_optimizer, make_target
from ctseg.training._types import CHECKPOINT_FORMAT_VERSION, CheckpointManifest, TrainerState

logger = logging.getLogger(__name__)

CHECKPOINTS_DIR: Final[str] = "checkpoints"
CHECKPOINT_MANIFEST: Final[str] = "manifest.json"
WEIGHTS_NAME: Final[str] = "weights.pt"

_STEP_DIR = re.compile(r"^step-(\d{8})$")


def checkpoint_dir(run_dir: Path, step: int) -> Path:
    """Directory of the checkpoint written at ``step`` inside ``run_dir``."""
    return run_dir / CHECKPOINTS_DIR / f"step-{step:08d}"


def list_checkpoints(run_dir: Path) -> list[Path]:
    """Return the checkpoint directories of a run in increasing step order."""
    root = run_dir / CHECKPOINTS_DIR
    if not root.is_dir():
        return []
    found = [
        p
        for p in root.iterdir()
        if _STEP_DIR.match(p.name) and (p / CHECKPOINT_MANIFEST).is_file()
    ]
    return sorted(found, key=lambda p: p.name)


def resolve_checkpoint(path: Path) -> Path:
    """Resolve a manifest file, checkpoint directory or run directory.

    A run directory resolves to its latest checkpoint.

    Raises:
        CheckpointError: If no checkpoint can be found at ``path``.
    """
    if path.is_file() and path.name == CHECKPOINT_MANIFEST:
        return path.parent
    if (path / CHECKPOINT_MANIFEST).is_file():
        return path
    checkpoints = list_checkpoints(path)
    if checkpoints:
        return checkpoints[-1]
    msg = f"No checkpoint found at {path}"
    raise CheckpointError(msg, path=path)


def save_checkpoint(
    state: TrainerState,
    cfg: RunConfig,
    directory: Path,
    metrics: dict[str, float] | None = None,
) -> CheckpointManifest:
    """Write ``state`` to ``directory``.

    Args:
        state: Trainer state to persist.
        cfg: Run configuration the state was trained with.
        directory: Checkpoint directory, created if needed.
        metrics: Latest evaluation metrics to record in the manifest.

    Returns:
        The manifest that was written.
    """
    directory.mkdir(parents=True, exist_ok=True)
    blob = {
        "step": state.step,
        "online": state.online.state_dict(),
        "target": state.target.state_dict(),
        "optimizer": state.optimizer.state_dict(),
        "generator": state.generator.get_state(),
    }
    torch.save(blob, directory / WEIGHTS_NAME)
    manifest = CheckpointManifest(
        format_version=CHECKPOINT_FORMAT_VERSION,
        step=state.step,
        config_hash=cfg.config_hash(),
        config=cfg.to_flat(),
        metrics=dict(metrics or {}),
        weights=WEIGHTS_NAME,
    )
    text = json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n"
    (directory / CHECKPOINT_MANIFEST).write_text(text, encoding="utf-8")
    logger.info("Saved checkpoint at step %d to %s", state.step, directory)
    return manifest


def read_checkpoint(path: Path) -> tuple[Path, CheckpointManifest, RunConfig]:
    """Read and verify a checkpoint manifest without loading weights.

    Returns:
        The checkpoint directory, its manifest and the run configuration it
        records.

    Raises:
        CheckpointError: On a missing or malformed manifest, an unsupported
            format version, or a config hash that does not match the
            recorded configuration.
    """
    directory = resolve_checkpoint(path)
    manifest_path = directory / CHECKPOINT_MANIFEST
    try:
        data: Any = json.loads(manifest_path.read_text(encoding="utf-8"))
        manifest = CheckpointManifest.from_dict(data)
    except (OSError, ValueError, KeyError, TypeError, AttributeError) as e:
        msg = f"Unreadable checkpoint manifest {manifest_path}: {e}"
        raise CheckpointError(msg, path=manifest_path) from e
    if manifest.format_version != CHECKPOINT_FORMAT_VERSION:
        msg = (
            f"Unsupported checkpoint format_version {manifest.format_version} "
            f"(expected {CHECKPOINT_FORMAT_VERSION}) in {manifest_path}"
        )
        raise CheckpointError(msg, path=manifest_path)
    try:
        cfg = RunConfig.from_flat(manifest.config)
    except CTSError as e:
        msg = f"Invalid configuration in {manifest_path}: {e}"
        raise CheckpointError(msg, path=manifest_path) from e
    if cfg.config_hash() != manifest.config_hash:
        msg = f"Config hash mismatch in {manifest_path}: manifest does not match its configuration"
        raise CheckpointError(msg, path=manifest_path)
    return directory, manifest, cfg


def load_checkpoint(path: Path, expected: RunConfig | None = None) -> TrainerState:
    """Restore the trainer state written by ``save_checkpoint``.

    Args:
        path: Manifest file, checkpoint directory or run directory.
        expected: When given, its config hash must match the checkpoint's.

    Returns:
        The restored state; resuming from it reproduces uninterrupted training.

    Raises:
        CheckpointError: On any manifest problem, a hash mismatch with
            ``expected``, or a missing or corrupt weights blob.
    """
    directory, manifest, cfg = read_checkpoint(path)
    if expected is not None and expected.config_hash() != manifest.config_hash:
        msg = (
            f"Config hash mismatch: checkpoint {directory} has {manifest.config_hash[:12]}, "
            f"run configuration has {expected.config_hash()[:12]}"
        )
        raise CheckpointError(msg, path=directory)
    blob_path = directory / manifest.weights
    try:
        blob = torch.load(blob_path, map_location="cpu", weights_only=True)
    except FileNotFoundError as e:
        msg = f"Missing weights blob {blob_path}"
        raise CheckpointError(msg, path=blob_path) from e
    except (OSError, RuntimeError, EOFError, pickle.UnpicklingError) as e:
        msg = f"Corrupt weights blob {blob_path}: {e}"
        raise CheckpointError(msg, path=blob_path) from e

    online = init_params(cfg.arch, cfg.train.seed or 0)
    try:
        online.load_state_dict(blob["online"])
        target = make_target(online)
        target.load_state_dict(blob["target"])
        optimizer = make_optimizer(online, cfg)
        optimizer.load_state_dict(blob["optimizer"])
        generator = torch.Generator()
        generator.set_state(blob["generator"])
        step = int(blob["step"])
    except (KeyError, RuntimeError, ValueError, TypeError) as e:
        msg = f"Corrupt weights blob {blob_path}: {e}"
        raise CheckpointError(msg, path=blob_path) from e
    if step != manifest.step:
        msg = f"Weights blob step {step} differs from manifest step {manifest.step}"
        raise CheckpointError(msg, path=blob_path)
    logger.info("Loaded checkpoint at step %d from %s", step, directory)
    return TrainerState(
        step=step, online=online, target=target, optimizer=optimizer, generator=generator
    )
