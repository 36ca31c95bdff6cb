import numpy as np
import pytest

from pcqlab.cloud import PointCloud


def make_cloud(rng, n, bit_depth=10, colors=True, name="fixture", integer=False):
    peak = 2 ** bit_depth - 1
    if integer:
        pos = rng.integers(0, peak + 1, size=(n, 3)).astype(np.float64)
    else:
        pos = rng.uniform(0, peak, size=(n, 3))
    col = rng.integers(0, 256, size=(n, 3)).astype(np.uint8) if colors else None
    return PointCloud(positions=pos, colors=col, bit_depth=bit_depth, name=name)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def cloud_factory():
    return make_cloud
