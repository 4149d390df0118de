"""Pytest fixtures for fatpoints tests."""

import os

import pytest

from fatpoints.config import FatpointsConfig
from fatpoints.prover import Prover


@pytest.fixture(autouse=True)
def clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    """Keep FATPOINTS_* variables from the caller's shell out of the tests."""
    for name in list(os.environ):
        if name.startswith("FATPOINTS_"):
            monkeypatch.delenv(name, raising=False)


@pytest.fixture
def config() -> FatpointsConfig:
    """A test configuration with few oracle trials."""
    return FatpointsConfig(_env_file=None, trials=2, seed=0)


@pytest.fixture
def prover(config: FatpointsConfig) -> Prover:
    """A fresh prover with an empty memo."""
    return Prover(config)
