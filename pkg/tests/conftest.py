import numpy as np
import pytest

from qlsplit import Field, GridSpec


@pytest.fixture
def grid() -> GridSpec:
    return GridSpec(64)


def random_field(grid: GridSpec, rng: np.random.Generator, scale: float = 1.0) -> Field:
    """Smooth-ish random complex field with reproducible content."""
    values = scale * (
        rng.standard_normal(grid.n_points) + 1j * rng.standard_normal(grid.n_points)
    )
    return Field(grid, values)
