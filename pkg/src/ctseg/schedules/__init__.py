"""Noise-level and EMA schedules for consistency training.

Pure functions of a ScheduleConfig; safe to share across threads.
"""

from ctseg._config import ScheduleConfig
from ctseg.schedules._schedules import (
    BoundaryCoefficients,
    boundary_coeffs,
    ema_decay,
    karras_sigmas,
    step_schedule,
)

__all__ = [
    "BoundaryCoefficients",
    "ScheduleConfig",
    "boundary_coeffs",
    "ema_decay",
    "karras_sigmas",
    "step_schedule",
]
