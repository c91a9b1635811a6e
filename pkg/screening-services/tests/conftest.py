"""Shared fixtures for the screening test suite."""

import numpy as np
import pytest

from rmst_screen.decorators.monitor_performance import reset_metrics
from rmst_screen.models.dataset import Dataset


@pytest.fixture(autouse=True)
def clean_metrics():
    reset_metrics()
    yield
    reset_metrics()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def hand_sample():
    """time=(1,2,3,4), status=(1,0,1,1): KM steps 0.75, 0.375, 0"""
    return np.array([1.0, 2.0, 3.0, 4.0]), np.array([1.0, 0.0, 1.0, 1.0])


def make_signal_dataset(rng, n=150, p=12, effect=1.5):
    """Column 0 drives survival, the rest is noise; about a quarter censored"""
    X = rng.standard_normal((n, p))
    latent = np.exp(-effect * X[:, 0] + 0.5 * rng.standard_normal(n))
    censor = rng.uniform(0.0, 4.0 * np.median(latent), size=n)
    time = np.minimum(latent, censor)
    status = (latent <= censor).astype(float)
    return Dataset(X, time, status)


@pytest.fixture
def signal_dataset(rng):
    return make_signal_dataset(rng)


@pytest.fixture
def write_text(tmp_path):
    """Write a text file under tmp_path and return its path as str"""
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return str(path)
    return _write


@pytest.fixture
def signal_factory():
    return make_signal_dataset
