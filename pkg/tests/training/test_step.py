"""Tests for a single consistency-training step."""

from __future__ import annotations

import dataclasses
import warnings
from unittest.mock import patch

import pytest
import torch

from ctseg import InvalidArgumentError, NumericalError, RunConfig, SegmentationDataset
from ctseg.data import Batch, stack_pairs
from ctseg.networks import consistency_forward, parameter_inventory
from ctseg.schedules import karras_sigmas
from ctseg.training import init_trainer_state, make_target, train_step


@pytest.fixture
def batch(dataset: SegmentationDataset) -> Batch:
    """Two training samples."""
    return stack_pairs(dataset.split("train")[:2])


def snapshot(model: torch.nn.Module) -> dict[str, torch.Tensor]:
    """Detached copies of every parameter."""
    return {name: p.detach().clone() for name, p in model.named_parameters()}


class TestTrainerState:
    """Tests for trainer-state construction."""

    def test_target_starts_as_copy(self, tiny_run_config: RunConfig) -> None:
        """The target should equal the online model and be frozen."""
        state = init_trainer_state(tiny_run_config)
        assert state.step == 0
        assert parameter_inventory(state.target) == parameter_inventory(state.online)
        for (_, a), (_, b) in zip(
            state.online.named_parameters(), state.target.named_parameters(), strict=True
        ):
            assert torch.equal(a, b)
            assert not b.requires_grad

    def test_make_target_is_independent(self, tiny_run_config: RunConfig) -> None:
        """Changing the online model should not change its target copy."""
        state = init_trainer_state(tiny_run_config)
        target = make_target(state.online)
        with torch.no_grad():
            state.online.output_layer.weight.add_(1.0)
        assert not target.output_layer.weight.any()


class TestTrainStep:
    """Tests for train_step."""

    def test_advances_step_and_reports(self, tiny_run_config: RunConfig, batch: Batch) -> None:
        """One step should advance k and return a sane breakdown."""
        state = init_trainer_state(tiny_run_config)
        returned, breakdown = train_step(state, batch, tiny_run_config)
        assert returned is state
        assert state.step == 1
        assert breakdown.n_levels == 2
        assert breakdown.n == 1
        assert breakdown.mu == pytest.approx(0.9)
        assert breakdown.l_total == pytest.approx(breakdown.l_ct + breakdown.l_s)
        assert breakdown.wall_ms > 0

    def test_no_warnings(self, tiny_run_config: RunConfig, batch: Batch) -> None:
        """Reporting the losses should not warn about scalars that require grad."""
        state = init_trainer_state(tiny_run_config)
        with warnings.catch_warnings():
            warnings.filterwarnings("error", message=".*requires_grad")
            _, breakdown = train_step(state, batch, tiny_run_config)
        assert isinstance(breakdown.l_total, float)

    def test_stopgrad_and_ema_over_ten_steps(
        self, tiny_run_config: RunConfig, batch: Batch
    ) -> None:
        """The target never accumulates gradients and follows the EMA rule."""
        state = init_trainer_state(tiny_run_config)
        for _ in range(10):
            old_target = snapshot(state.target)
            _, breakdown = train_step(state, batch, tiny_run_config)
            online = snapshot(state.online)
            mu = breakdown.mu
            for name, param in state.target.named_parameters():
                assert param.grad is None
                expected = mu * old_target[name].double() + (1 - mu) * online[name].double()
                torch.testing.assert_close(param.double(), expected, rtol=1e-6, atol=1e-7)

    def test_online_receives_gradients(self, tiny_run_config: RunConfig, batch: Batch) -> None:
        """The online output layer should move after one step."""
        state = init_trainer_state(tiny_run_config)
        train_step(state, batch, tiny_run_config)
        assert state.online.output_layer.weight.any()

    def test_frozen_target_when_mu_is_one(
        self, tiny_run_config: RunConfig, batch: Batch
    ) -> None:
        """With mu pinned to 1 the target should stay at its initial value."""
        state = init_trainer_state(tiny_run_config)
        initial = snapshot(state.target)
        with patch("ctseg.training._step.ema_decay", return_value=1.0):
            for _ in range(3):
                train_step(state, batch, tiny_run_config)
        for name, param in state.target.named_parameters():
            assert torch.equal(param, initial[name])
        assert not torch.equal(state.online.output_layer.weight, initial["denoiser.out.weight"])

    def test_shared_perturbation(self, tiny_run_config: RunConfig, batch: Batch) -> None:
        """Online and target inputs should share z at adjacent noise levels."""
        cfg = dataclasses.replace(
            tiny_run_config,
            schedule=dataclasses.replace(tiny_run_config.schedule, s0=8, s1=8),
        )
        state = init_trainer_state(cfg)
        with patch(
            "ctseg.training._step.consistency_forward", wraps=consistency_forward
        ) as spy:
            _, breakdown = train_step(state, batch, cfg)

        assert spy.call_count == 2
        (online_model, x_online, _, t_online, _), _ = spy.call_args_list[0]
        (target_model, x_target, _, t_target, _), _ = spy.call_args_list[1]
        assert online_model is state.online
        assert target_model is state.target
        sigmas = karras_sigmas(breakdown.n_levels, cfg.schedule)
        assert t_target == sigmas[breakdown.n - 1]
        assert t_online == sigmas[breakdown.n]
        z_online = (x_online - batch.masks) / t_online
        z_target = (x_target - batch.masks) / t_target
        torch.testing.assert_close(z_online, z_target, rtol=1e-4, atol=1e-3)

    def test_noise_index_range(self, tiny_run_config: RunConfig, batch: Batch) -> None:
        """n should always fall in {1, ..., N(k) - 1}."""
        cfg = dataclasses.replace(
            tiny_run_config,
            schedule=dataclasses.replace(tiny_run_config.schedule, s0=5, s1=5),
        )
        state = init_trainer_state(cfg)
        seen = set()
        for _ in range(10):
            _, breakdown = train_step(state, batch, cfg)
            assert 1 <= breakdown.n <= breakdown.n_levels - 1
            seen.add(breakdown.n)
        assert len(seen) > 1

    def test_deterministic(self, tiny_run_config: RunConfig, batch: Batch) -> None:
        """The same config and batch should give identical steps."""
        a = init_trainer_state(tiny_run_config)
        b = init_trainer_state(tiny_run_config)
        for _ in range(3):
            _, la = train_step(a, batch, tiny_run_config)
            _, lb = train_step(b, batch, tiny_run_config)
            assert (la.l_ct, la.l_s, la.n) == (lb.l_ct, lb.l_s, lb.n)

    def test_non_finite_loss_aborts(self, tiny_run_config: RunConfig, batch: Batch) -> None:
        """A NaN input should raise NumericalError without touching parameters."""
        state = init_trainer_state(tiny_run_config)
        before = snapshot(state.online)
        poisoned = dataclasses.replace(batch, images=torch.full_like(batch.images, float("nan")))
        with pytest.raises(NumericalError) as exc_info:
            train_step(state, poisoned, tiny_run_config)
        assert exc_info.value.step == 0
        assert state.step == 0
        for name, param in state.online.named_parameters():
            assert torch.equal(param, before[name])

    def test_finished_training(self, tiny_run_config: RunConfig, batch: Batch) -> None:
        """Stepping past K should be refused."""
        state = init_trainer_state(tiny_run_config)
        state.step = tiny_run_config.schedule.total_train_steps
        with pytest.raises(InvalidArgumentError, match="already finished"):
            train_step(state, batch, tiny_run_config)
