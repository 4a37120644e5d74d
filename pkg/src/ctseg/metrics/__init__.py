"""Segmentation metrics, evaluation reports and training-curve helpers."""

from ctseg.metrics._curves import (
    LossWindow,
    Metric,
    RunLog,
    loss_windows,
    read_run_log,
    steps_to_threshold,
)
from ctseg.metrics._evaluate import evaluate
from ctseg.metrics._overlap import dice, iou
from ctseg.metrics._report import EvaluationReport, SampleScore, evaluate_predictions

__all__ = [
    "EvaluationReport",
    "LossWindow",
    "Metric",
    "RunLog",
    "SampleScore",
    "dice",
    "evaluate",
    "evaluate_predictions",
    "iou",
    "loss_windows",
    "read_run_log",
    "steps_to_threshold",
]
