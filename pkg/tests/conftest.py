import numpy as np
import pytest

from mclift.core import Frame


def make_frame(rng: np.random.Generator, width: int, height: int, bit_depth: int) -> Frame:
    samples = rng.integers(0, 1 << bit_depth, size=(height, width), dtype=np.int32)
    return Frame(samples, bit_depth)


def make_pair(rng: np.random.Generator, width: int, height: int, bit_depth: int):
    return (
        make_frame(rng, width, height, bit_depth),
        make_frame(rng, width, height, bit_depth),
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0xC0FFEE)
