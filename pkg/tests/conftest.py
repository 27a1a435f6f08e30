import numpy as np
import pytest

from fieldvis.fields import GridSpec, ScalarField, VectorField


def grid_coords(grid: GridSpec):
    """Node coordinate arrays (X, Y, Z) with ij indexing."""
    xs = [grid.axis_coords(a) for a in range(3)]
    return np.meshgrid(*xs, indexing="ij")


def scalar_from(grid: GridSpec, fn) -> ScalarField:
    """Build a ScalarField by evaluating fn(x, y, z) at every node."""
    X, Y, Z = grid_coords(grid)
    return ScalarField(grid, np.asarray(fn(X, Y, Z), dtype=np.float64))


def vector_from(grid: GridSpec, fn) -> VectorField:
    """Build a VectorField from fn(x, y, z) -> (vx, vy, vz) arrays."""
    X, Y, Z = grid_coords(grid)
    vx, vy, vz = fn(X, Y, Z)
    vals = np.stack([np.broadcast_to(c, X.shape) for c in (vx, vy, vz)], axis=-1)
    return VectorField(grid, np.asarray(vals, dtype=np.float64))


@pytest.fixture
def unit_grid():
    """A 5^3 grid spanning [0,1]^3."""
    return GridSpec(dims=(5, 5, 5), origin=(0, 0, 0), spacing=(0.25, 0.25, 0.25))


def rotation_field(grid: GridSpec) -> VectorField:
    """v = (-y, x, 0): circular orbits around the z axis."""
    return vector_from(grid, lambda X, Y, Z: (-Y, X, np.zeros_like(Z)))
