"""Noise levels, discretization curriculum, EMA decay and preconditioning.

All functions are pure and work on Python floats (double precision), even
when the networks run in single precision.
"""

from __future__ import annotations

import math
from typing import NamedTuple

from ctseg._config import ScheduleConfig
from ctseg._exceptions import InvalidArgumentError


class BoundaryCoefficients(NamedTuple):
    """Preconditioning scalars at one noise level.

    Attributes:
        c_skip: Weight of the skip path (the noisy input itself).
        c_out: Weight of the network output.
        c_in: Scale applied to the noisy input before the network.
    """

    c_skip: float
    c_out: float
    c_in: float


def karras_sigmas(n_steps: int, cfg: ScheduleConfig) -> list[float]:
    """Discretize [sigma_min, sigma_max] into ``n_steps`` increasing noise levels.

    t_i = (eps^(1/rho) + (i-1)/(n_steps-1) * (T^(1/rho) - eps^(1/rho)))^rho

    Args:
        n_steps: Number of levels, at least 2.
        cfg: Schedule constants.

    Returns:
        Strictly increasing levels with ``t_1 == sigma_min`` and
        ``t_n == sigma_max`` exactly.

    Raises:
        InvalidArgumentError: If ``n_steps < 2``.
    """
    if n_steps < 2:
        msg = f"n_steps must be >= 2, got {n_steps}"
        raise InvalidArgumentError(msg)
    lo = cfg.sigma_min ** (1.0 / cfg.rho)
    hi = cfg.sigma_max ** (1.0 / cfg.rho)
    sigmas = [(lo + i / (n_steps - 1) * (hi - lo)) ** cfg.rho for i in range(n_steps)]
    # pin the endpoints; the power round trip can be off by an ulp
    sigmas[0] = cfg.sigma_min
    sigmas[-1] = cfg.sigma_max
    return sigmas


def _check_step(k: int, cfg: ScheduleConfig) -> None:
    if not 0 <= k <= cfg.total_train_steps:
        msg = f"Training step {k} outside [0, {cfg.total_train_steps}]"
        raise InvalidArgumentError(msg)


def step_schedule(k: int, cfg: ScheduleConfig) -> int:
    """Number of discretization levels N(k) at training step ``k``.

    N(k) = ceil(sqrt(k/K * ((s1+1)^2 - s0^2) + s0^2) - 1) + 1

    Args:
        k: Training step index in [0, K].
        cfg: Schedule constants.

    Returns:
        An integer in [s0, s1 + 1], non-decreasing in ``k``.

    Raises:
        InvalidArgumentError: If ``k`` is outside [0, K].
    """
    _check_step(k, cfg)
    s0, s1 = cfg.s0, cfg.s1
    radicand = k / cfg.total_train_steps * ((s1 + 1) ** 2 - s0**2) + s0**2
    return math.ceil(math.sqrt(radicand) - 1) + 1


def ema_decay(k: int, cfg: ScheduleConfig) -> float:
    """Target-model EMA decay mu(k) = exp(s0 * ln(mu0) / N(k)).

    Raises:
        InvalidArgumentError: If ``k`` is outside [0, K].
    """
    return math.exp(cfg.s0 * math.log(cfg.mu0) / step_schedule(k, cfg))


def boundary_coeffs(t: float, cfg: ScheduleConfig) -> BoundaryCoefficients:
    """Preconditioning coefficients at noise level ``t``.

    c_skip(t) = sigma_data^2 / ((t - eps)^2 + sigma_data^2)
    c_out(t)  = sigma_data * (t - eps) / sqrt(sigma_data^2 + t^2)
    c_in(t)   = 1 / sqrt(sigma_data^2 + t^2)

    At ``t == eps`` this gives c_skip = 1 and c_out = 0, so the consistency
    function is the identity there.

    Raises:
        InvalidArgumentError: If ``t < sigma_min``.
    """
    if t < cfg.sigma_min:
        msg = f"Noise level {t} is below sigma_min={cfg.sigma_min}"
        raise InvalidArgumentError(msg)
    sd2 = cfg.sigma_data**2
    shifted = t - cfg.sigma_min
    norm = math.sqrt(sd2 + t * t)
    return BoundaryCoefficients(
        c_skip=sd2 / (shifted * shifted + sd2),
        c_out=cfg.sigma_data * shifted / norm,
        c_in=1.0 / norm,
    )
