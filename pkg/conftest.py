"""Shared fixtures for the dcmi test suite."""

import math
from pathlib import Path
from typing import Callable

import pytest
from hypothesis import settings as hypothesis_settings

from dataset import LabeledDataset
from distributions import exponential_pair, gaussian_pair, sample

hypothesis_settings.register_profile('dcmi', deadline=None, print_blob=True)
hypothesis_settings.load_profile('dcmi')

# H(X) for label weights (1/3, 2/3)
LABEL_ENTROPY = math.log(3.0) - (2.0 / 3.0) * math.log(2.0)
# Exact MI of the exponential pair
EXPONENTIAL_MI = math.log(3.0) - 2.0 * math.log(2.0) + 1.0 / 3.0


@pytest.fixture(scope='session')
def separated_gaussian() -> LabeledDataset:
    """1000 pairs from the Gaussian pair with y_m=5, sigma_g=1."""
    return sample(gaussian_pair(5.0, 1.0), 1000, seed=0)


@pytest.fixture(scope='session')
def overlapping_gaussian() -> LabeledDataset:
    """1000 pairs from the Gaussian pair with y_m=1, sigma_g=1."""
    return sample(gaussian_pair(1.0, 1.0), 1000, seed=1)


@pytest.fixture(scope='session')
def exponential_sample() -> LabeledDataset:
    """1000 pairs from the exponential pair."""
    return sample(exponential_pair(), 1000, seed=2)


@pytest.fixture
def write_file(tmp_path: Path) -> Callable[[str, str], Path]:
    """Write text to a file under tmp_path and return its path."""

    def write(name: str, text: str) -> Path:
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return path

    return write
