"""Shared fixtures: small grids and pair sets reused across the suite."""

import numpy as np
import pytest

from jetsolve import BallGrid, PairSet, build_grid, build_pair_set


@pytest.fixture(scope="session")
def grid2() -> BallGrid:
    """Unit disk, coarse."""
    return build_grid(2, 1.0, 17)


@pytest.fixture(scope="session")
def grid3() -> BallGrid:
    """Unit ball in 3-d, coarse."""
    return build_grid(3, 1.0, 13)


@pytest.fixture(scope="session")
def pairs2(grid2) -> PairSet:
    return build_pair_set(grid2, seed=0)


@pytest.fixture(scope="session")
def pairs3(grid3) -> PairSet:
    return build_pair_set(grid3, seed=0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
