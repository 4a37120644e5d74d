"""Tests for the gen-data command."""

from __future__ import annotations

from pathlib import Path

from typer.testing import CliRunner

from ctseg.cli._main import app
from ctseg.data import MANIFEST_NAME

runner = CliRunner()

SMALL = ["--image-size", "16", "--n-train", "2", "--n-val", "1", "--n-test", "1"]


def tree_bytes(root: Path) -> dict[str, bytes]:
    """Relative path to content for every file under ``root``."""
    return {str(p.relative_to(root)): p.read_bytes() for p in root.rglob("*") if p.is_file()}


class TestGenDataCommand:
    """Tests for gen-data."""

    def test_deterministic(self, tmp_path: Path) -> None:
        """The same seed should write byte-identical datasets."""
        for name in ("a", "b"):
            result = runner.invoke(
                app, ["gen-data", "--out", str(tmp_path / name), "--seed", "7", *SMALL]
            )
            assert result.exit_code == 0, result.output
            assert "train=2, val=1, test=1" in result.output

        a = tree_bytes(tmp_path / "a")
        assert MANIFEST_NAME in a
        assert len(a) == 1 + 2 * 4
        assert a == tree_bytes(tmp_path / "b")

    def test_seed_from_environment(self, tmp_path: Path) -> None:
        """CTS_SEED should supply the seed when --seed is absent."""
        result = runner.invoke(
            app, ["gen-data", "--out", str(tmp_path / "d"), *SMALL], env={"CTS_SEED": "5"}
        )
        assert result.exit_code == 0, result.output
        assert "with seed 5" in result.output

    def test_config_file(self, tmp_path: Path) -> None:
        """Settings may come from a JSON file, flags win."""
        config = tmp_path / "gen.json"
        config.write_text('{"image_size": 16, "n_train": 3, "n_val": 1, "n_test": 1}')
        result = runner.invoke(
            app,
            ["gen-data", "--out", str(tmp_path / "d"), "--config", str(config), "--n-train", "1"],
        )
        assert result.exit_code == 0, result.output
        assert "train=1" in result.output

    def test_missing_out(self) -> None:
        """--out is required."""
        result = runner.invoke(app, ["gen-data", "--seed", "1"])
        assert result.exit_code == 2

    def test_invalid_setting(self, tmp_path: Path) -> None:
        """Unknown shape families should be a usage error."""
        result = runner.invoke(
            app, ["gen-data", "--out", str(tmp_path / "d"), "--shape-family", "star"]
        )
        assert result.exit_code == 2
