"""Main CLI entry point using Typer."""

from __future__ import annotations

from typing import Annotated

import typer

from ctseg.cli._data import gen_data
from ctseg.cli._evaluate import evaluate_checkpoint, predict
from ctseg.cli._report import report
from ctseg.cli._schedule import schedule
from ctseg.cli._train import train
from ctseg.cli._utils import OVERRIDE_CONTEXT, configure_logging

app = typer.Typer(
    name="ctseg",
    help="Consistency-training image segmentation with single-step inference.",
    no_args_is_help=True,
)


@app.callback()
def main(
    verbose: Annotated[
        int,
        typer.Option("--verbose", "-v", count=True, help="Log progress (-v) or details (-vv)"),
    ] = 0,
) -> None:
    """Consistency-training image segmentation with single-step inference."""
    configure_logging(verbose)


# Register subcommands
app.command("gen-data")(gen_data)
app.command("train", context_settings=OVERRIDE_CONTEXT)(train)
app.command("eval")(evaluate_checkpoint)
app.command("predict")(predict)
app.command("schedule", context_settings=OVERRIDE_CONTEXT)(schedule)
app.command("report")(report)


if __name__ == "__main__":
    app()
