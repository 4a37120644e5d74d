"""Tests for the consistency samplers."""

from __future__ import annotations

from collections.abc import Iterator

import pytest
import torch

from ctseg import InvalidArgumentError
from ctseg.networks import ConsistencySegmenter
from ctseg.sampling import (
    SamplerConfig,
    derive_seed,
    multistep_sigmas,
    segment,
    segment_multistep,
    segment_single_step,
)
from ctseg.schedules import ScheduleConfig


@pytest.fixture
def denoiser_calls(tiny_model: ConsistencySegmenter) -> Iterator[list[float]]:
    """Record the noise level of every denoiser evaluation."""
    calls: list[float] = []

    def hook(_module: torch.nn.Module, args: tuple[object, ...]) -> None:
        calls.append(float(args[2]))

    handle = tiny_model.denoiser.register_forward_pre_hook(hook)
    yield calls
    handle.remove()


class TestMultistepSigmas:
    """Tests for multistep_sigmas."""

    def test_single_level(self, schedule: ScheduleConfig) -> None:
        """One step samples at T only."""
        assert multistep_sigmas(1, schedule) == [schedule.sigma_max]

    @pytest.mark.parametrize("m", [2, 3, 5])
    def test_levels(self, schedule: ScheduleConfig, m: int) -> None:
        """m levels start at T, decrease strictly and stay above epsilon."""
        sigmas = multistep_sigmas(m, schedule)
        assert len(sigmas) == m
        assert sigmas[0] == schedule.sigma_max
        assert all(b < a for a, b in zip(sigmas, sigmas[1:], strict=False))
        assert sigmas[-1] > schedule.sigma_min

    def test_zero_steps(self, schedule: ScheduleConfig) -> None:
        """At least one step is required."""
        with pytest.raises(InvalidArgumentError, match=">= 1"):
            multistep_sigmas(0, schedule)


class TestSegment:
    """Tests for the single-step and multistep samplers."""

    def test_single_step_one_evaluation(
        self,
        tiny_model: ConsistencySegmenter,
        image_batch: torch.Tensor,
        schedule: ScheduleConfig,
        denoiser_calls: list[float],
    ) -> None:
        """Single-step sampling should evaluate the denoiser once, at T."""
        result = segment_single_step(tiny_model, image_batch, schedule, seed=0)
        assert denoiser_calls == [schedule.sigma_max]
        assert result.probabilities.shape == (2, 1, 16, 16)
        assert result.mask.dtype == torch.uint8

    @pytest.mark.parametrize("m", [2, 4])
    def test_multistep_evaluations(
        self,
        tiny_model: ConsistencySegmenter,
        image_batch: torch.Tensor,
        schedule: ScheduleConfig,
        denoiser_calls: list[float],
        m: int,
    ) -> None:
        """m-step sampling should evaluate the denoiser once per level."""
        sigmas = multistep_sigmas(m, schedule)
        segment_multistep(tiny_model, image_batch, sigmas, schedule, seed=0)
        assert denoiser_calls == pytest.approx(sigmas)

    def test_one_step_multistep_is_single_step(
        self,
        tiny_model: ConsistencySegmenter,
        image_batch: torch.Tensor,
        schedule: ScheduleConfig,
    ) -> None:
        """segment with steps=1 and with a one-level subset should agree."""
        a = segment(tiny_model, image_batch, schedule, SamplerConfig(steps=1), seed=4)
        b = segment_multistep(
            tiny_model, image_batch, multistep_sigmas(1, schedule), schedule, seed=4
        )
        assert torch.equal(a.probabilities, b.probabilities)

    def test_mask_thresholds_probabilities(
        self,
        tiny_model: ConsistencySegmenter,
        image_batch: torch.Tensor,
        schedule: ScheduleConfig,
    ) -> None:
        """The mask should be the probabilities thresholded at the given value."""
        result = segment(
            tiny_model, image_batch, schedule, SamplerConfig(steps=2, threshold=0.3), seed=1
        )
        p = result.probabilities
        assert ((p >= 0) & (p <= 1)).all()
        assert torch.equal(result.mask, (p >= 0.3).to(torch.uint8))

    def test_seed_determinism(
        self,
        tiny_model: ConsistencySegmenter,
        image_batch: torch.Tensor,
        schedule: ScheduleConfig,
    ) -> None:
        """One seed should reproduce a result; another should change it."""
        a = segment_multistep(tiny_model, image_batch, [80.0, 1.0], schedule, seed=7)
        b = segment_multistep(tiny_model, image_batch, [80.0, 1.0], schedule, seed=7)
        c = segment_multistep(tiny_model, image_batch, [80.0, 1.0], schedule, seed=8)
        assert torch.equal(a.probabilities, b.probabilities)
        assert not torch.equal(a.probabilities, c.probabilities)

    def test_global_rng_untouched(
        self,
        tiny_model: ConsistencySegmenter,
        image_batch: torch.Tensor,
        schedule: ScheduleConfig,
    ) -> None:
        """Sampling should draw from its own generator only."""
        torch.manual_seed(0)
        before = torch.get_rng_state()
        segment_single_step(tiny_model, image_batch, schedule, seed=0)
        assert torch.equal(before, torch.get_rng_state())

    @pytest.mark.parametrize(
        ("sigmas", "match"),
        [
            ([], "empty"),
            ([40.0, 1.0], "start at sigma_max"),
            ([80.0, 5.0, 5.0], "strictly decreasing"),
            ([80.0, 1.0, 2.0], "strictly decreasing"),
            ([80.0, 0.001], "sigma_min"),
        ],
    )
    def test_malformed_subset(
        self,
        tiny_model: ConsistencySegmenter,
        image_batch: torch.Tensor,
        schedule: ScheduleConfig,
        sigmas: list[float],
        match: str,
    ) -> None:
        """Malformed noise-level subsets should be rejected."""
        with pytest.raises(InvalidArgumentError, match=match):
            segment_multistep(tiny_model, image_batch, sigmas, schedule, seed=0)


class TestDeriveSeed:
    """Tests for derive_seed."""

    def test_stable_and_distinct(self) -> None:
        """Seeds should be reproducible and differ across indices."""
        seeds = [derive_seed(42, i) for i in range(100)]
        assert seeds == [derive_seed(42, i) for i in range(100)]
        assert len(set(seeds)) == 100
        assert derive_seed(43, 0) != derive_seed(42, 0)

    @pytest.mark.parametrize(("seed", "index"), [(-1, 0), (0, -1)])
    def test_negative_rejected(self, seed: int, index: int) -> None:
        """Negative seeds or indices should be invalid arguments."""
        with pytest.raises(InvalidArgumentError, match=">= 0"):
            derive_seed(seed, index)
