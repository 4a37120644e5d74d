"""Schedule inspection CLI subcommand."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Annotated, Final

import typer

from ctseg._config import ScheduleConfig
from ctseg.cli._utils import (
    build_run_config,
    console,
    handle_errors,
    parse_overrides,
)
from ctseg.schedules import boundary_coeffs, ema_decay, karras_sigmas, step_schedule

SIGMAS_CSV: Final[str] = "sigmas.csv"
CURRICULUM_CSV: Final[str] = "curriculum.csv"


def sigma_table(n_steps: int, cfg: ScheduleConfig) -> str:
    """CSV of i, t_i and the three boundary coefficients at t_i."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["i", "t", "c_skip", "c_out", "c_in"])
    for i, t in enumerate(karras_sigmas(n_steps, cfg), start=1):
        coeffs = boundary_coeffs(t, cfg)
        writer.writerow([i, repr(t), repr(coeffs.c_skip), repr(coeffs.c_out), repr(coeffs.c_in)])
    return buffer.getvalue()


def curriculum_table(every: int, cfg: ScheduleConfig) -> str:
    """CSV of k, N(k) and μ(k) every ``every`` steps, always including k = K."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["k", "N_k", "mu_k"])
    ks = list(range(0, cfg.total_train_steps, every)) + [cfg.total_train_steps]
    for k in ks:
        writer.writerow([k, step_schedule(k, cfg), repr(ema_decay(k, cfg))])
    return buffer.getvalue()


def schedule(
    ctx: typer.Context,
    config: Annotated[
        Path | None,
        typer.Option("--config", "-c", help="Flat dotted-key JSON config"),
    ] = None,
    n_steps: Annotated[
        int, typer.Option("--n-steps", "-n", min=2, help="Number of noise levels")
    ] = 18,
    every: Annotated[
        int, typer.Option("--every", min=1, help="Step spacing of the curriculum table")
    ] = 500,
    out: Annotated[
        Path | None,
        typer.Option("--out", "-o", help="Write sigmas.csv and curriculum.csv here"),
    ] = None,
) -> None:
    """Print the noise levels, coefficients and training curriculum as CSV.

    Without --out both tables go to stdout, separated by a blank line.

    Examples:
        ctseg schedule --n-steps 10
        ctseg schedule --schedule.total_train_steps 100000 --every 10000 --out tables
    """
    cfg = build_run_config(parse_overrides(ctx.args), config=config).schedule
    with handle_errors():
        sigmas = sigma_table(n_steps, cfg)
        curriculum = curriculum_table(every, cfg)
        if out is None:
            typer.echo(sigmas + "\n" + curriculum, nl=False)
            return
        out.mkdir(parents=True, exist_ok=True)
        (out / SIGMAS_CSV).write_text(sigmas, encoding="utf-8")
        (out / CURRICULUM_CSV).write_text(curriculum, encoding="utf-8")
        console.print(f"Wrote {SIGMAS_CSV} and {CURRICULUM_CSV} to {out}", soft_wrap=True)
