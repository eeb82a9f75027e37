"""Shared pytest fixtures."""
import numpy as np
import pytest

from stashkit.observability.metrics import reset_metrics
from stashkit.utils.timebase import fixed_clock

MIB = 1 << 20


@pytest.fixture(autouse=True)
def _clean_metrics():
    reset_metrics()
    yield


@pytest.fixture
def rng():
    return np.random.default_rng(20240229)


@pytest.fixture
def clock():
    return fixed_clock(1_700_000_000)


@pytest.fixture
def image():
    """4 MiB zero-filled user-data image."""
    return bytearray(4 * MIB)
