import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_gray(rng, height, width):
    return rng.integers(0, 256, size=(height, width), dtype=np.uint8)


def random_triple(rng, height, width):
    return (random_gray(rng, height, width),
            random_gray(rng, height, width),
            random_gray(rng, height, width))
