"""Pytest configuration and fixtures for netbell tests."""

import shutil
import tempfile
from pathlib import Path

import numpy as np
import pytest

from netbell.simulators.ansatz import hardware_ansatz
from netbell.simulators.network import build_network


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    temp_path = Path(tempfile.mkdtemp())
    yield temp_path
    shutil.rmtree(temp_path)


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(20240607)


@pytest.fixture
def chsh_ansatz():
    """Bell pair with RY measurements on the two-party network."""
    return hardware_ansatz(build_network("chsh"))


@pytest.fixture
def bilocal_ansatz():
    """Hardware ansatz on the bilocal network."""
    return hardware_ansatz(build_network("bilocal"))


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    """Run restarts in-process unless a test asks otherwise."""
    monkeypatch.setenv("NETBELL_WORKERS", "1")
