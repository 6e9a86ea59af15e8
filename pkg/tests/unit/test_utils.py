"""Unit tests for the utils module."""

import numpy as np
import pytest

from netbell.utils import (
    create_output_dir,
    default_output_dir,
    flatten_config,
    format_gamma,
    format_score,
    worker_count,
)


@pytest.mark.unit
class TestUtils:
    """Test utility functions."""

    def test_create_output_dir(self, temp_dir):
        """Test creating output directory."""
        output_path = temp_dir / "output" / "nested"
        assert create_output_dir(str(output_path)) == output_path
        assert output_path.is_dir()

    def test_create_output_dir_existing(self, temp_dir):
        """Test creating output directory when it already exists."""
        output_path = temp_dir / "existing_output"
        output_path.mkdir()

        # Should not raise error
        create_output_dir(output_path)
        assert output_path.exists()

    def test_default_output_dir(self, monkeypatch, temp_dir):
        """Test the environment override of the output directory."""
        monkeypatch.delenv("NETBELL_OUTPUT_DIR", raising=False)
        assert str(default_output_dir()) == "output"
        monkeypatch.setenv("NETBELL_OUTPUT_DIR", str(temp_dir))
        assert default_output_dir() == temp_dir


@pytest.mark.unit
class TestWorkerCount:
    """Test the worker count lookup."""

    def test_argument_wins(self, monkeypatch):
        """Test that an explicit count ignores the environment."""
        monkeypatch.setenv("NETBELL_WORKERS", "8")
        assert worker_count(3) == 3

    def test_environment(self, monkeypatch):
        """Test reading NETBELL_WORKERS."""
        monkeypatch.setenv("NETBELL_WORKERS", "4")
        assert worker_count() == 4

    def test_default(self, monkeypatch):
        """Test one worker when nothing is set."""
        monkeypatch.delenv("NETBELL_WORKERS", raising=False)
        assert worker_count() == 1

    @pytest.mark.parametrize("raw", ["many", "0"])
    def test_rejects(self, monkeypatch, raw):
        """Test non-integer and non-positive counts."""
        monkeypatch.setenv("NETBELL_WORKERS", raw)
        with pytest.raises(ValueError):
            worker_count()


@pytest.mark.unit
class TestFormats:
    """Test number formats of emitted files."""

    def test_format_score(self):
        """Test twelve significant digits."""
        assert format_score(2 * np.sqrt(2)) == "2.82842712475"
        assert format_score(np.float64(1.0)) == "1"

    def test_format_score_blank(self):
        """Test blank output for undefined scores."""
        assert format_score(None) == ""
        assert format_score(float("nan")) == ""
        assert format_score(np.float64("nan")) == ""

    def test_format_gamma(self):
        """Test six decimals."""
        assert format_gamma(0.3) == "0.300000"
        assert format_gamma(1) == "1.000000"

    def test_flatten_config(self):
        """Test dotted keys and joined lists."""
        config = {
            "network": "bilocal",
            "noise": {"model": "dephasing", "gamma": [0.1, 0.2]},
            "optimizer": {"restarts": 3},
        }
        assert flatten_config(config) == {
            "network": "bilocal",
            "noise.model": "dephasing",
            "noise.gamma": "0.1,0.2",
            "optimizer.restarts": 3,
        }
