"""Shared fixtures for the fhlab test suite."""

import pytest

from src.lab.fields import SpaceTimeField, SpaceTimeGrid
from src.lab.fracheat import FracConfig
from src.lab.frequency import GaussianQuadrature


@pytest.fixture
def grid() -> SpaceTimeGrid:
    return SpaceTimeGrid(dim=1, x_points=32, t_points=32)


@pytest.fixture
def half() -> FracConfig:
    return FracConfig(s=0.5)


@pytest.fixture
def quad() -> GaussianQuadrature:
    return GaussianQuadrature()


@pytest.fixture
def shifted_cosine(grid: SpaceTimeGrid) -> SpaceTimeField:
    """u = 2 + cos x: positive, one nonconstant mode with L = 1."""
    return SpaceTimeField.from_modes(grid, [((0,), 0, 2.0), ((1,), 0, 0.5)])


@pytest.fixture
def mixed_field(grid: SpaceTimeGrid) -> SpaceTimeField:
    """Real field with modes moving in both space and time."""
    return SpaceTimeField.from_modes(
        grid,
        [((0,), 0, 1.0), ((1,), 0, 0.5), ((2,), 1, 0.25 - 0.1j), ((1,), -2, 0.05j)],
    )
