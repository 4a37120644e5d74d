"""ctseg CLI - train, evaluate and inspect consistency segmentation models.

Command-line interface wrapping dataset generation, training, evaluation,
prediction and schedule inspection.
"""

from ctseg.cli._main import app

__all__ = ["app"]
