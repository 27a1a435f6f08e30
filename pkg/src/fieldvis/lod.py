"""Multiresolution pyramid with an axis-aligned region of interest.

Queries inside the ROI hit the full-resolution field; everything outside is
served from a factor-2 box-average pyramid level (hard switch, no blending
band).  Geometry consumers opt in by substituting
:func:`effective_scalar_field` / :func:`effective_vector_field` for the
original; when the ROI covers the whole domain the substitution returns the
original field object, so outputs are bit-identical to the no-LOD path.

An axis that is already down to 2 nodes stops halving (its spacing stays
fixed and values pass through), so coarse grids never outgrow their data.
Coarse grids of odd-sized axes span slightly less than the fine domain;
out-of-range coarse queries clamp to the coarse bounds (edge extension).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import OutOfDomainError
from .fields import (
    GridSpec,
    ScalarField,
    VectorField,
    _trilinear_many,
    sample_scalar,
    sample_vector,
)


@dataclass(frozen=True)
class RoiContext:
    """World-space ROI box plus the pyramid level used outside it."""

    roi_min: tuple[float, float, float]
    roi_max: tuple[float, float, float]
    outside_level: int = 1

    def __post_init__(self):
        lo = tuple(float(c) for c in self.roi_min)
        hi = tuple(float(c) for c in self.roi_max)
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError("roi_min must be <= roi_max componentwise")
        if self.outside_level < 0:
            raise ValueError("outside_level must be >= 0")
        object.__setattr__(self, "roi_min", lo)
        object.__setattr__(self, "roi_max", hi)

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.float64)
        return np.all(pts >= np.array(self.roi_min), axis=-1) & np.all(
            pts <= np.array(self.roi_max), axis=-1
        )

    def covers(self, grid: GridSpec) -> bool:
        return bool(
            np.all(np.array(self.roi_min) <= grid.bounds_min)
            and np.all(np.array(self.roi_max) >= grid.bounds_max)
        )

    def intersects(self, grid: GridSpec) -> bool:
        return bool(
            np.all(np.array(self.roi_min) <= grid.bounds_max)
            and np.all(np.array(self.roi_max) >= grid.bounds_min)
        )


@dataclass(frozen=True)
class LodPyramid:
    """Level 0 is the original field; level k is box-averaged by 2^k."""

    levels: tuple

    def __post_init__(self):
        if not self.levels:
            raise ValueError("pyramid needs at least one level")
        object.__setattr__(self, "levels", tuple(self.levels))

    def __len__(self) -> int:
        return len(self.levels)

    @property
    def grid(self) -> GridSpec:
        return self.levels[0].grid


def _downsample_once(grid: GridSpec, vals: np.ndarray):
    factors = tuple(2 if n > 2 else 1 for n in grid.dims)
    if factors == (1, 1, 1):
        return None
    acc = None
    cnt = None
    for off in product(*(range(f) for f in factors)):
        sub = vals[off[0] :: factors[0], off[1] :: factors[1], off[2] :: factors[2]]
        shape = sub.shape[:3]
        if acc is None:
            cdims = tuple(-(-n // f) for n, f in zip(grid.dims, factors))  # ceil div
            acc = np.zeros(cdims + vals.shape[3:], dtype=np.float64)
            cnt = np.zeros(cdims, dtype=np.float64)
        sl = tuple(slice(0, s) for s in shape)
        acc[sl] += sub
        cnt[sl] += 1
    if vals.ndim == 4:
        coarse = acc / cnt[..., None]
    else:
        coarse = acc / cnt
    cgrid = GridSpec(
        dims=coarse.shape[:3],
        origin=grid.origin,
        spacing=tuple(s * f for s, f in zip(grid.spacing, factors)),
    )
    return cgrid, coarse


def max_pyramid_levels(dims) -> int:
    """How many levels a pyramid over these dims can have (level 0 included)."""
    dims = tuple(int(d) for d in dims)
    n = 1
    while any(d > 2 for d in dims):
        dims = tuple(-(-d // 2) if d > 2 else d for d in dims)
        n += 1
    return n


def build_lod_pyramid(field, max_levels: int = 4) -> LodPyramid:
    """Box-average pyramid: each coarser node is the mean of its children.

    Boundary nodes average the children that exist.  Stops early once no
    axis can shrink further (all dims at 2).
    """
    if max_levels < 1:
        raise ValueError("max_levels must be >= 1")
    is_vector = isinstance(field, VectorField)
    levels = [field]
    grid, vals = field.grid, field.values
    while len(levels) < max_levels:
        ds = _downsample_once(grid, vals)
        if ds is None:
            break
        grid, vals = ds
        levels.append(VectorField(grid, vals) if is_vector else ScalarField(grid, vals))
    return LodPyramid(tuple(levels))


def _coarse_level(pyr: LodPyramid, ctx: RoiContext):
    if ctx.outside_level >= len(pyr):
        raise ValueError(
            f"outside_level {ctx.outside_level} >= pyramid depth {len(pyr)}"
        )
    return pyr.levels[ctx.outside_level]


def _clamped(grid: GridSpec, pts: np.ndarray) -> np.ndarray:
    return np.minimum(np.maximum(pts, grid.bounds_min), grid.bounds_max)


def sample_with_lod(pyr: LodPyramid, ctx: RoiContext, p):
    """Level-0 trilinear sample inside the ROI, coarse-level sample outside."""
    p = np.asarray(p, dtype=np.float64)
    base = pyr.levels[0]
    if not base.grid.contains(p):
        raise OutOfDomainError(p)
    if ctx.contains_many(p[None, :])[0]:
        if isinstance(base, VectorField):
            return sample_vector(base, p)
        return sample_scalar(base, p)
    coarse = _coarse_level(pyr, ctx)
    q = _clamped(coarse.grid, p)
    if isinstance(coarse, VectorField):
        return sample_vector(coarse, q)
    return sample_scalar(coarse, q)


def _effective_values(pyr: LodPyramid, ctx: RoiContext):
    base = pyr.levels[0]
    grid = base.grid
    if not ctx.intersects(grid):
        raise ValueError("ROI does not intersect the domain")
    if ctx.covers(grid):
        return None  # LOD is a no-op
    coarse = _coarse_level(pyr, ctx)
    xs = [grid.axis_coords(a) for a in range(3)]
    X, Y, Z = np.meshgrid(*xs, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=1)
    outside = ~ctx.contains_many(pts)
    vals = base.values.copy()
    if outside.any():
        q = _clamped(coarse.grid, pts[outside])
        repl = _trilinear_many(coarse.grid, coarse.values, q)
        flat_shape = (-1,) if base.values.ndim == 3 else (-1, 3)
        flat = vals.reshape(flat_shape)
        flat[outside] = repl
    return vals


def effective_scalar_field(pyr: LodPyramid, ctx: RoiContext | None) -> ScalarField:
    """Level-0 field with out-of-ROI nodes resampled from the coarse level.

    Returns the original field object when ctx is None or covers the domain.
    """
    base = pyr.levels[0]
    if ctx is None:
        return base
    vals = _effective_values(pyr, ctx)
    return base if vals is None else ScalarField(base.grid, vals)


def effective_vector_field(pyr: LodPyramid, ctx: RoiContext | None) -> VectorField:
    base = pyr.levels[0]
    if ctx is None:
        return base
    vals = _effective_values(pyr, ctx)
    return base if vals is None else VectorField(base.grid, vals)
