"""
Shared fixtures.

Random instances come from a seeded numpy Generator so a failing instance
can be rebuilt from the seed printed in the assertion message.
"""
import numpy as np
import pytest

from hindsight.core.config import get_settings
from hindsight.core.types import ReturnSeries


@pytest.fixture(autouse=True)
def _fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def make_series():
    """make_series(rng, n, zeros=False, integers=False) -> ReturnSeries"""

    def build(rng, n, zeros=False, integers=False):
        if integers:
            r = rng.integers(-4, 5, size=n).astype(float)
        else:
            r = rng.normal(0.0, 1.0, size=n)
        if zeros and n:
            r[rng.random(n) < 0.2] = 0.0
        return ReturnSeries(r)

    return build


@pytest.fixture
def write_csv(tmp_path):
    """write_csv(name, text) -> path"""

    def write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
