import numpy as np
import pytest

from visco2d.spectral import SpectralGrid


@pytest.fixture(scope="session")
def grid32() -> SpectralGrid:
    return SpectralGrid(32)


@pytest.fixture(scope="session")
def grid64() -> SpectralGrid:
    return SpectralGrid(64)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)
