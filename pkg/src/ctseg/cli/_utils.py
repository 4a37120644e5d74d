"""Shared CLI utilities."""

from __future__ import annotations

import logging
from contextlib import contextmanager
from pathlib import Path
from typing import TYPE_CHECKING, Final

import typer
from rich.console import Console
from rich.logging import RichHandler

from ctseg import CTSError, NumericalError
from ctseg._config import RunConfig
from ctseg._exceptions import InvalidArgumentError

if TYPE_CHECKING:
    from collections.abc import Iterator, Mapping, Sequence

console = Console()
err_console = Console(stderr=True)

EXIT_RUNTIME_ERROR: Final[int] = 1
EXIT_NUMERICAL_ABORT: Final[int] = 3

#: Accepts unknown ``--section.field value`` options so they can be parsed as overrides.
OVERRIDE_CONTEXT: Final[dict[str, bool]] = {
    "allow_extra_args": True,
    "ignore_unknown_options": True,
}


def configure_logging(verbosity: int) -> None:
    """Route ctseg logs to a RichHandler on stderr (-v info, -vv debug)."""
    if verbosity <= 0:
        return
    level = logging.INFO if verbosity == 1 else logging.DEBUG
    handler = RichHandler(console=err_console, show_path=False, rich_tracebacks=True)
    package_logger = logging.getLogger("ctseg")
    package_logger.setLevel(level)
    package_logger.addHandler(handler)


@contextmanager
def handle_errors() -> Iterator[None]:
    """Context manager that maps ctseg errors to CLI exit codes.

    NumericalError exits with code 3, every other CTSError and OS-level I/O
    failure with code 1.

    Usage:
        with handle_errors():
            result = train_loop(cfg, dataset, run_dir)
    """
    try:
        yield
    except NumericalError as e:
        err_console.print(f"Numerical abort: {e}", style="bold red")
        raise typer.Exit(code=EXIT_NUMERICAL_ABORT) from e
    except (CTSError, OSError) as e:
        err_console.print(f"Error: {e}", style="bold red")
        raise typer.Exit(code=EXIT_RUNTIME_ERROR) from e


def parse_overrides(tokens: Sequence[str]) -> dict[str, str]:
    """Parse ``--section.field value`` and ``--section.field=value`` tokens.

    Raises:
        typer.BadParameter: On stray tokens or a missing value (exit code 2).
    """
    overrides: dict[str, str] = {}
    it = iter(tokens)
    for token in it:
        if not token.startswith("--") or "." not in token:
            msg = f"Unexpected argument {token!r}; overrides look like --train.lr 1e-4"
            raise typer.BadParameter(msg)
        key, sep, value = token[2:].partition("=")
        if not sep:
            following = next(it, None)
            if following is None:
                msg = f"Missing value for --{key}"
                raise typer.BadParameter(msg)
            value = following
        overrides[key] = value
    return overrides


def build_run_config(
    overrides: Mapping[str, object],
    config: Path | None = None,
    base: RunConfig | None = None,
) -> RunConfig:
    """Layer ``overrides`` over a config file, or over ``base`` / the defaults.

    Raises:
        typer.BadParameter: If a key is unknown or a value is invalid (exit code 2).
    """
    try:
        if config is not None:
            return RunConfig.from_file(config, overrides)
        return RunConfig.from_flat(overrides, base=base)
    except InvalidArgumentError as e:
        raise typer.BadParameter(str(e)) from e
