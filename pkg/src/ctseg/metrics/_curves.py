"""Training-curve helpers over the JSONL run log."""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal

import numpy as np

from ctseg._exceptions import CTSError, InvalidArgumentError

Metric = Literal["dice", "iou"]


@dataclass(frozen=True, slots=True)
class RunLog:
    """Parsed training log.

    Attributes:
        losses: Per-step loss records in file order.
        evals: Evaluation records in file order.
    """

    losses: tuple[dict[str, Any], ...]
    evals: tuple[dict[str, Any], ...]


@dataclass(frozen=True, slots=True)
class LossWindow:
    """Mean losses over a block of consecutive steps.

    Attributes:
        first_step: First step of the window.
        last_step: Last step of the window.
        l_ct: Mean consistency loss.
        l_s: Mean segmentation loss.
        l_total: Mean total loss.
    """

    first_step: int
    last_step: int
    l_ct: float
    l_s: float
    l_total: float


def read_run_log(path: Path) -> RunLog:
    """Split a JSONL training log into loss and evaluation records.

    Raises:
        CTSError: If a line is not a JSON object of either kind.
    """
    losses: list[dict[str, Any]] = []
    evals: list[dict[str, Any]] = []
    with path.open(encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except ValueError as e:
                msg = f"{path}:{lineno}: invalid JSON: {e}"
                raise CTSError(msg) from e
            if isinstance(record, dict) and "l_total" in record:
                losses.append(record)
            elif isinstance(record, dict) and "dice" in record:
                evals.append(record)
            else:
                msg = f"{path}:{lineno}: not a loss or evaluation record"
                raise CTSError(msg)
    return RunLog(losses=tuple(losses), evals=tuple(evals))


def steps_to_threshold(
    evals: Sequence[dict[str, Any]],
    threshold: float,
    metric: Metric = "dice",
    split: str | None = "val",
) -> int | None:
    """Return the first evaluated step whose ``metric`` reaches ``threshold``.

    Args:
        evals: Evaluation records with ``step``, ``split`` and the metric.
        threshold: Target value.
        metric: ``"dice"`` or ``"iou"``.
        split: Only consider records of this split; None considers all.

    Returns:
        The step, or None if the threshold is never reached.
    """
    for record in sorted(evals, key=lambda r: int(r["step"])):
        if split is not None and record.get("split") != split:
            continue
        if float(record[metric]) >= threshold:
            return int(record["step"])
    return None


def loss_windows(losses: Sequence[dict[str, Any]], window: int) -> list[LossWindow]:
    """Average consecutive loss records in blocks of ``window`` steps.

    Raises:
        InvalidArgumentError: If ``window < 1``.
    """
    if window < 1:
        msg = f"window must be >= 1, got {window}"
        raise InvalidArgumentError(msg)
    out = []
    for start in range(0, len(losses), window):
        block = losses[start : start + window]
        out.append(
            LossWindow(
                first_step=int(block[0]["step"]),
                last_step=int(block[-1]["step"]),
                l_ct=float(np.mean([r["l_ct"] for r in block])),
                l_s=float(np.mean([r["l_s"] for r in block])),
                l_total=float(np.mean([r["l_total"] for r in block])),
            )
        )
    return out
