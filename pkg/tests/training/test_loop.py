"""Tests for the training loop."""

from __future__ import annotations

import dataclasses
import json
import math
from pathlib import Path
from typing import Any
from unittest.mock import patch

import pytest
import torch

from ctseg import InvalidArgumentError, NumericalError, RunConfig, SegmentationDataset
from ctseg.training import (
    LOG_NAME,
    checkpoint_dir,
    list_checkpoints,
    load_checkpoint,
    train_loop,
)


def read_log(run_dir: Path) -> list[dict[str, Any]]:
    """Decode the JSONL training log of a run."""
    lines = (run_dir / LOG_NAME).read_text().splitlines()
    return [json.loads(line) for line in lines]


class TestTrainLoop:
    """Tests for train_loop."""

    def test_full_run_artifacts(
        self, tmp_path: Path, tiny_run_config: RunConfig, dataset: SegmentationDataset
    ) -> None:
        """Ten steps should log ten loss records and checkpoint at 5 and 10."""
        run = tmp_path / "run"
        result = train_loop(tiny_run_config, dataset, run)

        assert result.state.step == 10
        assert len(result.losses) == 10
        assert result.log_path == run / LOG_NAME
        records = read_log(run)
        assert [r["step"] for r in records] == list(range(1, 11))
        assert {"l_ct", "l_s", "l_total", "n", "N_k", "mu_k", "wall_ms"} <= records[0].keys()
        assert [p.name for p in list_checkpoints(run)] == ["step-00000005", "step-00000010"]
        assert result.checkpoint == checkpoint_dir(run, 10)

    def test_final_checkpoint_off_interval(
        self, tmp_path: Path, tiny_run_config: RunConfig, dataset: SegmentationDataset
    ) -> None:
        """Stopping between intervals should still leave a checkpoint."""
        run = tmp_path / "run"
        result = train_loop(tiny_run_config, dataset, run, until_step=3)
        assert result.state.step == 3
        assert result.checkpoint == checkpoint_dir(run, 3)
        assert load_checkpoint(run).step == 3

    def test_resume_matches_uninterrupted(
        self, tmp_path: Path, tiny_run_config: RunConfig, dataset: SegmentationDataset
    ) -> None:
        """Stopping at 5 and resuming should reproduce a straight ten-step run."""
        straight = train_loop(tiny_run_config, dataset, tmp_path / "a")

        resumed_dir = tmp_path / "b"
        train_loop(tiny_run_config, dataset, resumed_dir, until_step=5)
        state = load_checkpoint(checkpoint_dir(resumed_dir, 5), expected=tiny_run_config)
        resumed = train_loop(tiny_run_config, dataset, resumed_dir, state=state)

        assert resumed.state.step == 10
        for model in ("online", "target"):
            want = getattr(straight.state, model).state_dict()
            got = getattr(resumed.state, model).state_dict()
            for key in want:
                torch.testing.assert_close(got[key], want[key])
        want_losses = [(b.n, b.l_total) for b in straight.losses[5:]]
        got_losses = [(b.n, b.l_total) for b in resumed.losses]
        assert [n for n, _ in got_losses] == [n for n, _ in want_losses]
        assert [t for _, t in got_losses] == pytest.approx([t for _, t in want_losses])
        assert [r["step"] for r in read_log(resumed_dir)] == list(range(1, 11))

    def test_deterministic(
        self, tmp_path: Path, tiny_run_config: RunConfig, dataset: SegmentationDataset
    ) -> None:
        """Two runs with one config should log the same losses."""
        a = train_loop(tiny_run_config, dataset, tmp_path / "a", until_step=4)
        b = train_loop(tiny_run_config, dataset, tmp_path / "b", until_step=4)
        assert [x.l_total for x in a.losses] == [x.l_total for x in b.losses]

    def test_periodic_evaluation(
        self, tmp_path: Path, tiny_run_config: RunConfig, dataset: SegmentationDataset
    ) -> None:
        """eval_interval should add eval records and manifest metrics."""
        cfg = dataclasses.replace(
            tiny_run_config, train=dataclasses.replace(tiny_run_config.train, eval_interval=5)
        )
        run = tmp_path / "run"
        train_loop(cfg, dataset, run)

        evals = [r for r in read_log(run) if "split" in r]
        assert [r["step"] for r in evals] == [5, 10]
        for record in evals:
            assert record["split"] == "val"
            assert 0.0 <= record["dice"] <= 1.0
            assert 0.0 <= record["iou"] <= record["dice"] + 1e-12
        manifest = json.loads((checkpoint_dir(run, 10) / "manifest.json").read_text())
        assert manifest["metrics"]["dice"] == evals[-1]["dice"]

    @pytest.mark.parametrize("until_step", [-1, 11])
    def test_until_step_out_of_range(
        self,
        tmp_path: Path,
        tiny_run_config: RunConfig,
        dataset: SegmentationDataset,
        until_step: int,
    ) -> None:
        """until_step must lie between the current step and K."""
        with pytest.raises(InvalidArgumentError, match="until_step"):
            train_loop(tiny_run_config, dataset, tmp_path / "run", until_step=until_step)

    def test_numerical_error_propagates(
        self, tmp_path: Path, tiny_run_config: RunConfig, dataset: SegmentationDataset
    ) -> None:
        """A non-finite loss should abort the loop without a checkpoint."""
        run = tmp_path / "run"
        error = NumericalError(0, float("nan"), 0.1)
        with (
            patch("ctseg.training._loop.train_step", side_effect=error),
            pytest.raises(NumericalError),
        ):
            train_loop(tiny_run_config, dataset, run)
        assert list_checkpoints(run) == []

    def test_trainable_without_multiscale(
        self, tmp_path: Path, tiny_run_config: RunConfig, dataset: SegmentationDataset
    ) -> None:
        """With zeroed condition features the loss should stay finite and fall."""
        base = tiny_run_config.with_total_steps(200)
        train = dataclasses.replace(base.train, use_multiscale=False, checkpoint_interval=0)
        cfg = dataclasses.replace(base, train=train)

        result = train_loop(cfg, dataset, tmp_path / "run")

        totals = [b.l_total for b in result.losses]
        assert len(totals) == 200
        assert all(math.isfinite(v) for v in totals)
        assert sum(totals[-50:]) / 50 < sum(totals[:50]) / 50
