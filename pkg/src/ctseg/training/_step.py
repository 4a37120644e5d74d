"""One consistency-training step and trainer-state construction."""

from __future__ import annotations

import copy
import logging
import time

import torch

from ctseg._config import RunConfig
from ctseg._exceptions import InvalidArgumentError, NumericalError
from ctseg.data import Batch
from ctseg.networks import ConsistencySegmenter, consistency_forward, init_params
from ctseg.schedules import ema_decay, karras_sigmas, step_schedule
from ctseg.training._ema import ema_update
from ctseg.training._losses import ct_loss, seg_loss, total_loss
from ctseg.training._types import LossBreakdown, TrainerState

logger = logging.getLogger(__name__)


def make_target(online: ConsistencySegmenter) -> ConsistencySegmenter:
    """Copy ``online`` into a frozen target model (θ^TM ← θ^M)."""
    target = copy.deepcopy(online)
    target.requires_grad_(False)
    target.eval()
    return target


def make_optimizer(model: ConsistencySegmenter, cfg: RunConfig) -> torch.optim.AdamW:
    """AdamW over the online parameters."""
    return torch.optim.AdamW(
        model.parameters(),
        lr=cfg.train.lr,
        betas=(cfg.train.beta1, cfg.train.beta2),
        weight_decay=cfg.train.weight_decay,
    )


def init_trainer_state(cfg: RunConfig) -> TrainerState:
    """Initialize θ^M from the training seed, copy it into θ^TM and set k = 0."""
    seed = cfg.train.seed or 0
    online = init_params(cfg.arch, seed)
    return TrainerState(
        step=0,
        online=online,
        target=make_target(online),
        optimizer=make_optimizer(online, cfg),
        generator=torch.Generator().manual_seed(seed),
    )


def train_step(
    state: TrainerState, batch: Batch, cfg: RunConfig
) -> tuple[TrainerState, LossBreakdown]:
    """Run one consistency-training step and advance ``state`` in place.

    Draws n uniformly from {1, ..., N(k) - 1} and one perturbation z shared by
    both noise levels. The online model sees the mask perturbed at t_{n+1},
    the target model at t_n without gradient. After the AdamW step on θ^M the
    target is pulled towards it with decay μ(k).

    Args:
        state: Trainer state, advanced in place; ``state.step`` is incremented.
        batch: Images and encoded masks.
        cfg: Run configuration.

    Returns:
        The same state object and the loss breakdown of this step.

    Raises:
        InvalidArgumentError: If training has already reached K steps.
        NumericalError: If the loss is not finite; parameters are untouched.
    """
    schedule, train = cfg.schedule, cfg.train
    k = state.step
    if k >= schedule.total_train_steps:
        msg = f"Training already finished: step {k} of {schedule.total_train_steps}"
        raise InvalidArgumentError(msg)
    start = time.perf_counter()

    n_levels = step_schedule(k, schedule)
    mu = ema_decay(k, schedule)
    sigmas = karras_sigmas(n_levels, schedule)
    n = int(torch.randint(1, n_levels, (1,), generator=state.generator).item())
    t_n, t_n1 = sigmas[n - 1], sigmas[n]
    x = batch.masks
    z = torch.randn(x.shape, generator=state.generator, dtype=x.dtype)

    state.online.train()
    online_out = consistency_forward(
        state.online,
        x + t_n1 * z,
        batch.images,
        t_n1,
        schedule,
        use_multiscale=train.use_multiscale,
    )
    with torch.no_grad():
        target_out = consistency_forward(
            state.target,
            x + t_n * z,
            batch.images,
            t_n,
            schedule,
            use_multiscale=train.use_multiscale,
        )
    l_ct = ct_loss(online_out.y, target_out.y, train.lambda_weight)
    l_s = seg_loss(online_out.aux_logits, batch.labels)
    loss = total_loss(l_ct, l_s, train.alpha)
    if not torch.isfinite(loss):
        raise NumericalError(step=k, l_ct=l_ct.item(), l_s=l_s.item())

    state.optimizer.zero_grad(set_to_none=True)
    loss.backward()
    torch.nn.utils.clip_grad_norm_(state.online.parameters(), train.grad_clip)
    state.optimizer.step()
    ema_update(state.target, state.online, mu)
    state.step = k + 1

    breakdown = LossBreakdown(
        l_ct=l_ct.item(),
        l_s=l_s.item(),
        l_total=loss.item(),
        n=n,
        n_levels=n_levels,
        mu=mu,
        wall_ms=(time.perf_counter() - start) * 1000.0,
    )
    logger.debug(
        "step %d: n=%d N=%d mu=%.6f l_ct=%.6g l_s=%.6g",
        k + 1,
        n,
        n_levels,
        mu,
        breakdown.l_ct,
        breakdown.l_s,
    )
    return state, breakdown
