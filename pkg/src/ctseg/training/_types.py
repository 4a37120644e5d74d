"""Training state and record types for ctseg."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Final

import torch

from ctseg.networks import ConsistencySegmenter

#: Checkpoint manifest format written by this version of ctseg.
CHECKPOINT_FORMAT_VERSION: Final[int] = 1


@dataclass(slots=True, eq=False)
class TrainerState:
    """Everything that evolves during training.

    Attributes:
        step: Number of completed optimizer steps (k).
        online: Gradient-trained model θ^M.
        target: EMA model θ^TM; its parameters never require gradients.
        optimizer: AdamW over the online parameters.
        generator: Random stream for noise levels and perturbations.
    """

    step: int
    online: ConsistencySegmenter
    target: ConsistencySegmenter
    optimizer: torch.optim.AdamW
    generator: torch.Generator


@dataclass(frozen=True, slots=True)
class LossBreakdown:
    """Diagnostics of one training step.

    Attributes:
        l_ct: Consistency loss.
        l_s: Segmentation loss on the online ŷ.
        l_total: l_ct + α · l_s.
        n: Sampled index of the lower noise level (1-based).
        n_levels: Discretization size N(k).
        mu: EMA decay μ(k) applied after the step.
        wall_ms: Wall time of the step in milliseconds.
    """

    l_ct: float
    l_s: float
    l_total: float
    n: int
    n_levels: int
    mu: float
    wall_ms: float

    def to_record(self, step: int) -> dict[str, Any]:
        """Return the JSONL log record for completed step ``step``."""
        return {
            "step": step,
            "l_ct": self.l_ct,
            "l_s": self.l_s,
            "l_total": self.l_total,
            "n": self.n,
            "N_k": self.n_levels,
            "mu_k": self.mu,
            "wall_ms": self.wall_ms,
        }


@dataclass(frozen=True, slots=True)
class CheckpointManifest:
    """Metadata stored next to a checkpoint's weights blob.

    Attributes:
        format_version: Manifest format version.
        step: Training step at which the checkpoint was written.
        config_hash: SHA-256 of the canonical run configuration.
        config: Flat dotted run configuration.
        metrics: Latest evaluation metrics, possibly empty.
        weights: File name of the weights blob, relative to the manifest.
    """

    format_version: int
    step: int
    config_hash: str
    config: dict[str, Any]
    metrics: dict[str, float] = field(default_factory=dict)
    weights: str = "weights.pt"

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> CheckpointManifest:
        """Create from a manifest JSON object.

        Args:
            data: The decoded manifest.

        Returns:
            A CheckpointManifest instance.
        """
        return cls(
            format_version=int(data["format_version"]),
            step=int(data["step"]),
            config_hash=str(data["config_hash"]),
            config=dict(data["config"]),
            metrics={str(k): float(v) for k, v in data.get("metrics", {}).items()},
            weights=str(data.get("weights", "weights.pt")),
        )

    def to_dict(self) -> dict[str, Any]:
        """Return the JSON-serializable form."""
        return {
            "format_version": self.format_version,
            "step": self.step,
            "config_hash": self.config_hash,
            "config": self.config,
            "metrics": self.metrics,
            "weights": self.weights,
        }


@dataclass(frozen=True, slots=True, eq=False)
class TrainResult:
    """Outcome of ``train_loop``.

    Attributes:
        state: Final trainer state.
        checkpoint: Directory of the last checkpoint written.
        losses: Breakdown of every step run by this call.
        log_path: JSONL training log.
    """

    state: TrainerState
    checkpoint: Path
    losses: tuple[LossBreakdown, ...]
    log_path: Path
