"""The training loop: batching, periodic evaluation, checkpoints and the JSONL log."""

from __future__ import annotations

import dataclasses
import json
import logging
import math
from pathlib import Path
from typing import Any, Final, TextIO

from ctseg._config import RunConfig
from ctseg._exceptions import InvalidArgumentError, NumericalError
from ctseg.data import Batch, SegmentationDataset, iterate_batches
from ctseg.metrics import evaluate
from ctseg.training._checkpoint import checkpoint_dir, save_checkpoint
from ctseg.training._step import init_trainer_state, train_step
from ctseg.training._types import LossBreakdown, TrainerState, TrainResult

logger = logging.getLogger(__name__)

LOG_NAME: Final[str] = "train_log.jsonl"
TRAIN_SPLIT: Final[str] = "train"


def _append(log: TextIO, record: dict[str, Any]) -> None:
    log.write(json.dumps(record) + "\n")
    log.flush()


class _BatchSchedule:
    """Maps a global step to its batch.

    Step k falls in epoch k // batches_per_epoch, whose shuffle is seeded with
    seed + epoch, so the batch is a function of k alone.
    """

    def __init__(self, dataset: SegmentationDataset, batch_size: int, seed: int) -> None:
        self._dataset = dataset
        self._batch_size = batch_size
        self._seed = seed
        self.batches_per_epoch = math.ceil(len(dataset.split(TRAIN_SPLIT)) / batch_size)
        self._epoch = -1
        self._batches: list[Batch] = []

    def batch_for_step(self, step: int) -> Batch:
        epoch = step // self.batches_per_epoch
        if epoch != self._epoch:
            self._batches = iterate_batches(
                self._dataset, TRAIN_SPLIT, self._batch_size, self._seed + epoch
            )
            self._epoch = epoch
        return self._batches[step % self.batches_per_epoch]


def train_loop(
    cfg: RunConfig,
    dataset: SegmentationDataset,
    run_dir: Path,
    *,
    state: TrainerState | None = None,
    until_step: int | None = None,
) -> TrainResult:
    """Train until K steps (or ``until_step``) and write the run artifacts.

    Every step appends a loss record to ``<run_dir>/train_log.jsonl``. Every
    ``eval_interval`` steps the EMA target is evaluated single-step on
    ``eval_split`` and an eval record is appended. Checkpoints are written
    every ``checkpoint_interval`` steps and always when the loop stops.

    Args:
        cfg: Run configuration.
        dataset: Loaded dataset with a non-empty train split.
        run_dir: Output directory, created if needed.
        state: State to resume from; a fresh state is initialized when None.
        until_step: Stop after this many completed steps instead of K.

    Returns:
        The final state, the last checkpoint directory and this call's losses.

    Raises:
        InvalidArgumentError: If ``until_step`` lies outside [state.step, K].
        NumericalError: If a step produces a non-finite loss.
        OSError: If the log or a checkpoint cannot be written.
    """
    train = cfg.train
    seed = train.seed or 0
    if state is None:
        state = init_trainer_state(cfg)
    stop = cfg.schedule.total_train_steps if until_step is None else until_step
    if not state.step <= stop <= cfg.schedule.total_train_steps:
        msg = f"until_step={stop} must lie in [{state.step}, {cfg.schedule.total_train_steps}]"
        raise InvalidArgumentError(msg)

    batches = _BatchSchedule(dataset, train.batch_size, seed)
    eval_pairs = dataset.split(train.eval_split) if train.eval_interval else ()
    eval_sampler = dataclasses.replace(cfg.sampler, steps=1)
    run_dir.mkdir(parents=True, exist_ok=True)
    log_path = run_dir / LOG_NAME
    losses: list[LossBreakdown] = []
    metrics: dict[str, float] = {}
    last_saved: int | None = None
    checkpoint = checkpoint_dir(run_dir, state.step)

    logger.info(
        "Training from step %d to %d (%d batches per epoch)",
        state.step,
        stop,
        batches.batches_per_epoch,
    )
    with log_path.open("a", encoding="utf-8") as log:
        while state.step < stop:
            try:
                _, breakdown = train_step(state, batches.batch_for_step(state.step), cfg)
            except NumericalError as e:
                logger.error("Aborting: %s", e)
                raise
            losses.append(breakdown)
            _append(log, breakdown.to_record(state.step))
            if train.log_interval and state.step % train.log_interval == 0:
                logger.info(
                    "step %d/%d l_total=%.5f l_ct=%.5f l_s=%.5f N=%d",
                    state.step,
                    stop,
                    breakdown.l_total,
                    breakdown.l_ct,
                    breakdown.l_s,
                    breakdown.n_levels,
                )
            if train.eval_interval and state.step % train.eval_interval == 0:
                report = evaluate(
                    state.target,
                    eval_pairs,
                    cfg.schedule,
                    eval_sampler,
                    seed,
                    use_multiscale=train.use_multiscale,
                )
                metrics = {"dice": report.mean_dice, "iou": report.mean_iou}
                _append(log, {"step": state.step, "split": train.eval_split, **metrics})
            if train.checkpoint_interval and state.step % train.checkpoint_interval == 0:
                checkpoint = checkpoint_dir(run_dir, state.step)
                save_checkpoint(state, cfg, checkpoint, metrics)
                last_saved = state.step
    if last_saved != state.step:
        checkpoint = checkpoint_dir(run_dir, state.step)
        save_checkpoint(state, cfg, checkpoint, metrics)
    return TrainResult(state=state, checkpoint=checkpoint, losses=tuple(losses), log_path=log_path)
