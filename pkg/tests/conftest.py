import numpy as np
import pytest

from eulerlab.grid import Grid


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def aligned_grid_2d(R, cells_per_R=32, half_target=2.5, periodic=False):
    """Square grid whose cell centers include the origin and (R, 0).

    Odd cell count puts a center at 0; spacing R/cells_per_R puts one at R.
    """
    h = R / cells_per_R
    n = int(round(2 * half_target * R / h))
    if n % 2 == 0:
        n += 1
    half = n * h / 2
    return Grid.regular((n, n), (2 * half, 2 * half), periodic=periodic)
