"""Evaluation and prediction CLI subcommands."""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path
from typing import Annotated, Any

import typer

from ctseg._config import ENV_SEED, RunConfig
from ctseg._exceptions import CheckpointError
from ctseg.cli._utils import console, handle_errors
from ctseg.data import load_dataset
from ctseg.metrics import evaluate
from ctseg.networks import ConsistencySegmenter
from ctseg.sampling import predict_batch, predict_images
from ctseg.training import TrainerState, list_checkpoints, load_checkpoint, read_checkpoint


def _pick_model(state: TrainerState, cfg: RunConfig, online: bool) -> ConsistencySegmenter:
    return state.online if online or not cfg.sampler.use_target else state.target


def _default_eval_path(checkpoint: Path, directory: Path, split: str, series: bool) -> Path:
    if series:
        return checkpoint / f"eval-{split}.jsonl"
    return directory / f"eval-{split}.json"


def _sampler_config(cfg: RunConfig, steps: int | None) -> RunConfig:
    if steps is None:
        return cfg
    try:
        sampler = dataclasses.replace(cfg.sampler, steps=steps)
    except ValueError as e:
        raise typer.BadParameter(str(e)) from e
    return dataclasses.replace(cfg, sampler=sampler)


def evaluate_checkpoint(
    checkpoint: Annotated[
        Path, typer.Argument(help="Checkpoint directory, manifest or run directory")
    ],
    data: Annotated[Path, typer.Option("--data", "-d", help="Dataset directory")],
    split: Annotated[str, typer.Option("--split", help="Split to evaluate")] = "val",
    out: Annotated[
        Path | None,
        typer.Option("--out", "-o", help="JSON file (default: eval-<split>.json[l] in the run)"),
    ] = None,
    all_checkpoints: Annotated[
        bool,
        typer.Option("--all", help="Evaluate every checkpoint of a run, one JSON line each"),
    ] = False,
    steps: Annotated[
        int | None, typer.Option("--steps", help="Sampling steps (default from config)")
    ] = None,
    seed: Annotated[
        int | None,
        typer.Option(
            "--seed", envvar=ENV_SEED, min=0, help="Sampling seed (default: training seed)"
        ),
    ] = None,
    online: Annotated[
        bool, typer.Option("--online", help="Use the online instead of the EMA weights")
    ] = False,
) -> None:
    """Evaluate Dice and IoU of a checkpoint on a dataset split.

    Prints the report as JSON and writes it to --out, by default
    eval-<split>.json inside the evaluated checkpoint. With --all, CHECKPOINT
    is a run directory, every checkpoint is evaluated in step order and the
    lines go to eval-<split>.jsonl in the run directory.

    Examples:
        ctseg eval runs/m --data data --split test
        ctseg eval runs/m --data data --all --out curve.jsonl
    """
    with handle_errors():
        targets = list_checkpoints(checkpoint) if all_checkpoints else [checkpoint]
        if not targets:
            msg = f"No checkpoints under {checkpoint}"
            raise CheckpointError(msg, path=checkpoint)
        lines: list[str] = []
        dataset = None
        directory = checkpoint
        for target in targets:
            directory, manifest, cfg = read_checkpoint(target)
            cfg = _sampler_config(cfg, steps)
            if dataset is None:
                dataset = load_dataset(data, cfg.preprocess)
            state = load_checkpoint(directory)
            report = evaluate(
                _pick_model(state, cfg, online),
                dataset.split(split),
                cfg.schedule,
                cfg.sampler,
                seed if seed is not None else cfg.train.seed or 0,
                use_multiscale=cfg.train.use_multiscale,
            )
            payload: dict[str, Any] = {
                "checkpoint": str(directory),
                "step": manifest.step,
                "split": split,
            }
            if all_checkpoints:
                payload.update(mean_dice=report.mean_dice, mean_iou=report.mean_iou)
                lines.append(json.dumps(payload))
            else:
                payload.update(report.to_dict())
                lines.append(json.dumps(payload, indent=2))
        text = "\n".join(lines) + "\n"
        typer.echo(text, nl=False)
        if out is None:
            out = _default_eval_path(checkpoint, directory, split, all_checkpoints)
        out.write_text(text, encoding="utf-8")


def predict(
    checkpoint: Annotated[
        Path, typer.Argument(help="Checkpoint directory, manifest or run directory")
    ],
    out: Annotated[Path, typer.Option("--out", "-o", help="Output directory")],
    images: Annotated[
        list[Path] | None, typer.Argument(help="Raw grayscale PNGs to segment")
    ] = None,
    data: Annotated[
        Path | None, typer.Option("--data", "-d", help="Dataset directory (instead of images)")
    ] = None,
    split: Annotated[str, typer.Option("--split", help="Dataset split to predict")] = "test",
    steps: Annotated[
        int | None,
        typer.Option("--steps", help="Sampling steps; > 1 uses the multistep sampler"),
    ] = None,
    seed: Annotated[
        int | None,
        typer.Option(
            "--seed", envvar=ENV_SEED, min=0, help="Sampling seed (default: training seed)"
        ),
    ] = None,
    online: Annotated[
        bool, typer.Option("--online", help="Use the online instead of the EMA weights")
    ] = False,
) -> None:
    """Write <id>_mask.png and <id>_overlay.png predictions.

    Segments the given images, or a whole dataset split with --data (which
    also writes metrics.json).

    Examples:
        ctseg predict runs/m scan.png --out preds
        ctseg predict runs/m --data data --split test --steps 10
    """
    if not images and data is None:
        msg = "Give image paths or --data"
        raise typer.BadParameter(msg)
    with handle_errors():
        _, _, cfg = read_checkpoint(checkpoint)
        cfg = _sampler_config(cfg, steps)
        state = load_checkpoint(checkpoint)
        model = _pick_model(state, cfg, online)
        sample_seed = seed if seed is not None else cfg.train.seed or 0
        if images:
            written = predict_images(
                model,
                images,
                out,
                cfg.schedule,
                cfg.sampler,
                cfg.preprocess,
                sample_seed,
                use_multiscale=cfg.train.use_multiscale,
            )
            console.print(f"Wrote {len(written)} files to {out}", soft_wrap=True)
        elif data is not None:
            dataset = load_dataset(data, cfg.preprocess)
            report = predict_batch(
                model,
                dataset.split(split),
                out,
                cfg.schedule,
                cfg.sampler,
                sample_seed,
                use_multiscale=cfg.train.use_multiscale,
            )
            console.print(
                f"Wrote {len(report)} predictions to {out}: "
                f"dice={report.mean_dice:.4f} iou={report.mean_iou:.4f}",
                soft_wrap=True,
            )
