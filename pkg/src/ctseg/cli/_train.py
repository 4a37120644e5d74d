"""Training CLI subcommand."""

from __future__ import annotations

from pathlib import Path
from typing import Annotated, Any, Final

import typer

from ctseg._config import ENV_SEED
from ctseg.cli._utils import (
    build_run_config,
    console,
    handle_errors,
    parse_overrides,
)
from ctseg.data import load_dataset
from ctseg.training import load_checkpoint, read_checkpoint, train_loop

RESOLVED_CONFIG_NAME: Final[str] = "config.resolved.json"


def train(
    ctx: typer.Context,
    data: Annotated[Path, typer.Option("--data", "-d", help="Dataset directory")],
    out: Annotated[Path, typer.Option("--out", "-o", help="Run directory")],
    config: Annotated[
        Path | None,
        typer.Option("--config", "-c", help="Flat dotted-key JSON config"),
    ] = None,
    steps: Annotated[
        int | None,
        typer.Option("--steps", help="Total training steps K"),
    ] = None,
    seed: Annotated[
        int | None,
        typer.Option("--seed", envvar=ENV_SEED, min=0, help="Training seed"),
    ] = None,
    no_multiscale: Annotated[
        bool,
        typer.Option("--no-multiscale", help="Replace the condition pyramid by zeros (CTS-nM)"),
    ] = False,
    resume: Annotated[
        Path | None,
        typer.Option("--resume", help="Checkpoint or run directory to continue from"),
    ] = None,
    until_step: Annotated[
        int | None,
        typer.Option("--until-step", help="Stop after this many completed steps"),
    ] = None,
) -> None:
    """Train a consistency segmentation model.

    Any config field can be overridden with --section.field VALUE. Flags
    override the config file, which overrides the defaults. The effective
    configuration is written to <out>/config.resolved.json.

    Examples:
        ctseg train --data data --out runs/m --steps 5000
        ctseg train --data data --out runs/nm --no-multiscale --train.lr 2e-4
        ctseg train --data data --out runs/m --resume runs/m
    """
    overrides: dict[str, Any] = parse_overrides(ctx.args)
    if steps is not None:
        overrides["train.total_train_steps"] = steps
    if seed is not None:
        overrides["train.seed"] = seed
    if no_multiscale:
        overrides["train.use_multiscale"] = False

    with handle_errors():
        base = read_checkpoint(resume)[2] if resume is not None and config is None else None
        cfg = build_run_config(overrides, config=config, base=base)
        state = load_checkpoint(resume, expected=cfg) if resume is not None else None

        out.mkdir(parents=True, exist_ok=True)
        resolved = out / RESOLVED_CONFIG_NAME
        resolved.write_text(cfg.to_json() + "\n", encoding="utf-8")
        dataset = load_dataset(data, cfg.preprocess)
        result = train_loop(cfg, dataset, out, state=state, until_step=until_step)

        console.print(f"Trained to step {result.state.step} (config {cfg.config_hash()[:12]})")
        if result.losses:
            last = result.losses[-1]
            console.print(
                f"Last step: l_total={last.l_total:.5f} l_ct={last.l_ct:.5f} l_s={last.l_s:.5f}"
            )
        console.print(f"Checkpoint: {result.checkpoint}", soft_wrap=True)
