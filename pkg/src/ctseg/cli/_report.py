"""Run report CLI subcommand."""

from __future__ import annotations

from pathlib import Path
from typing import Annotated

import typer
from rich.table import Table

from ctseg.cli._utils import console, handle_errors
from ctseg.metrics import loss_windows, read_run_log, steps_to_threshold
from ctseg.training import LOG_NAME


def report(
    run_dir: Annotated[Path, typer.Argument(help="Run directory written by 'ctseg train'")],
    window: Annotated[
        int, typer.Option("--window", "-w", min=1, help="Steps averaged per loss row")
    ] = 100,
    threshold: Annotated[
        float, typer.Option("--threshold", "-t", help="Dice threshold for convergence")
    ] = 0.7,
    split: Annotated[str, typer.Option("--split", help="Evaluation split to report")] = "val",
) -> None:
    """Summarize the training log of a run.

    Shows windowed loss averages, the evaluation history and the first step
    at which Dice reached the threshold.

    Examples:
        ctseg report runs/m
        ctseg report runs/nm --window 500 --threshold 0.8
    """
    with handle_errors():
        log = read_run_log(run_dir / LOG_NAME)

    if not log.losses:
        console.print(f"No training steps logged in {run_dir}")
        return

    losses = Table(title=f"Losses for {run_dir.name}")
    losses.add_column("Steps", style="cyan")
    losses.add_column("L_total", style="white", justify="right")
    losses.add_column("L_CT", style="green", justify="right")
    losses.add_column("L_S", style="yellow", justify="right")
    for row in loss_windows(log.losses, window):
        losses.add_row(
            f"{row.first_step}-{row.last_step}",
            f"{row.l_total:.5f}",
            f"{row.l_ct:.5f}",
            f"{row.l_s:.5f}",
        )
    console.print(losses)

    evals = [r for r in log.evals if r.get("split") == split]
    if not evals:
        console.print(f"No {split} evaluations logged")
        return

    history = Table(title=f"Evaluations on {split}")
    history.add_column("Step", style="cyan", justify="right")
    history.add_column("Dice", style="green", justify="right")
    history.add_column("IoU", style="yellow", justify="right")
    for record in evals:
        history.add_row(str(record["step"]), f"{record['dice']:.4f}", f"{record['iou']:.4f}")
    console.print(history)

    reached = steps_to_threshold(evals, threshold, split=split)
    if reached is None:
        console.print(f"Dice never reached {threshold}")
    else:
        console.print(f"Dice reached {threshold} at step {reached}")
