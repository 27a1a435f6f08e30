"""Uniform rectilinear grids, scalar/vector fields, and trilinear sampling.

Fields are immutable after construction; sampling never mutates state, so all
kernels may read the same field concurrently.

On-disk layout (see :func:`load_dataset`): a dataset directory holds a JSON
manifest ``manifest.vf5`` plus one raw file per field per time step.  Raw
files are 32-bit little-endian IEEE floats in x-fastest node order
(``index = i + nx*(j + ny*k)``); vector files interleave the three components
per node.  In memory values are kept as float64 arrays indexed ``[i, j, k]``
(``[i, j, k, c]`` for vectors).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (
    ManifestParseError,
    MissingFileError,
    NonFiniteError,
    OutOfDomainError,
    TruncatedDataError,
)

MANIFEST_NAME = "manifest.vf5"


@dataclass(frozen=True)
class GridSpec:
    """Geometry of a uniform rectilinear grid: node counts, origin, spacing."""

    dims: tuple[int, int, int]
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "origin", tuple(float(c) for c in self.origin))
        object.__setattr__(self, "spacing", tuple(float(c) for c in self.spacing))
        if len(self.dims) != 3 or len(self.origin) != 3 or len(self.spacing) != 3:
            raise ValueError("dims, origin, spacing must each have 3 entries")
        if any(d < 2 for d in self.dims):
            raise ValueError(f"every dim must be >= 2, got {self.dims}")
        if any(not (s > 0) for s in self.spacing):
            raise ValueError(f"every spacing must be > 0, got {self.spacing}")

    @property
    def n_nodes(self) -> int:
        nx, ny, nz = self.dims
        return nx * ny * nz

    @cached_property
    def bounds_min(self) -> np.ndarray:
        return np.array(self.origin, dtype=np.float64)

    @cached_property
    def bounds_max(self) -> np.ndarray:
        d = np.array(self.dims, dtype=np.float64) - 1.0
        return self.bounds_min + d * np.array(self.spacing, dtype=np.float64)

    @property
    def extent(self) -> np.ndarray:
        return self.bounds_max - self.bounds_min

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(self.extent))

    @property
    def min_spacing(self) -> float:
        return float(min(self.spacing))

    def node_position(self, i: int, j: int, k: int) -> np.ndarray:
        return self.bounds_min + np.array([i, j, k], dtype=np.float64) * np.array(
            self.spacing, dtype=np.float64
        )

    def axis_coords(self, axis: int) -> np.ndarray:
        """Node coordinates along one axis (0=x, 1=y, 2=z)."""
        return self.origin[axis] + self.spacing[axis] * np.arange(self.dims[axis])

    def contains(self, p) -> bool:
        """Closed-bounds test: points exactly on the max face are inside."""
        p = np.asarray(p, dtype=np.float64)
        return bool(np.all(p >= self.bounds_min) and np.all(p <= self.bounds_max))

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.float64)
        return np.all(pts >= self.bounds_min, axis=-1) & np.all(
            pts <= self.bounds_max, axis=-1
        )


def _check_values(grid: GridSpec, values: np.ndarray, ncomp: int | None) -> np.ndarray:
    want = grid.dims if ncomp is None else grid.dims + (ncomp,)
    values = np.asarray(values, dtype=np.float64)
    if values.shape != want:
        raise ValueError(f"values shape {values.shape} != expected {want}")
    if not np.all(np.isfinite(values)):
        raise NonFiniteError("field contains NaN or Inf values")
    values.setflags(write=False)
    return values


@dataclass(frozen=True)
class ScalarField:
    """One scalar value per grid node, indexed ``values[i, j, k]``."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _check_values(self.grid, self.values, None))

    @cached_property
    def min(self) -> float:
        return float(self.values.min())

    @cached_property
    def max(self) -> float:
        return float(self.values.max())


@dataclass(frozen=True)
class VectorField:
    """One 3-vector per grid node, indexed ``values[i, j, k, c]``."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _check_values(self.grid, self.values, 3))

    @cached_property
    def rms_magnitude(self) -> float:
        """Root-mean-square of |v| over all nodes; scales stagnation thresholds."""
        mag2 = np.sum(self.values * self.values, axis=-1)
        return float(np.sqrt(mag2.mean()))


@dataclass(frozen=True)
class FieldSet:
    """A time series of named scalar and vector fields sharing one grid."""

    grid: GridSpec
    steps: int
    scalars: dict[str, list[ScalarField]] = field(default_factory=dict)
    vectors: dict[str, list[VectorField]] = field(default_factory=dict)

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        overlap = set(self.scalars) & set(self.vectors)
        if overlap:
            raise ValueError(f"field names shared between scalars and vectors: {overlap}")
        for name, fs in list(self.scalars.items()) + list(self.vectors.items()):
            if len(fs) != self.steps:
                raise ValueError(f"field {name!r} has {len(fs)} steps, expected {self.steps}")
            for f in fs:
                if f.grid != self.grid:
                    raise ValueError(f"field {name!r} grid differs from the dataset grid")

    def scalar(self, name: str, step: int = 0) -> ScalarField:
        return self.scalars[name][step]

    def vector(self, name: str, step: int = 0) -> VectorField:
        return self.vectors[name][step]


# ---------------------------------------------------------------------------
# Sampling


def _exact_node(grid: GridSpec, p: np.ndarray):
    """Return node indices when p reproduces a node position bit-for-bit."""
    origin = grid.bounds_min
    spacing = np.array(grid.spacing)
    n = np.rint((p - origin) / spacing).astype(np.int64)
    if np.any(n < 0) or np.any(n >= np.array(grid.dims)):
        return None
    if np.all(origin + n * spacing == p):
        return n
    return None


def _trilinear_many(grid: GridSpec, values: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Trilinear interpolation at points already known to be inside the domain.

    ``values`` is ``(nx,ny,nz)`` or ``(nx,ny,nz,3)``; returns ``(n,)`` or ``(n,3)``.
    """
    origin = grid.bounds_min
    spacing = np.array(grid.spacing)
    dims = np.array(grid.dims)

    rel = (pts - origin) / spacing
    cell = np.clip(np.floor(rel).astype(np.int64), 0, dims - 2)
    f = np.clip(rel - cell, 0.0, 1.0)

    i, j, k = cell[:, 0], cell[:, 1], cell[:, 2]
    fx, fy, fz = f[:, 0], f[:, 1], f[:, 2]
    if values.ndim == 4:  # broadcast weights over the component axis
        fx, fy, fz = fx[:, None], fy[:, None], fz[:, None]

    c000 = values[i, j, k]
    c100 = values[i + 1, j, k]
    c010 = values[i, j + 1, k]
    c110 = values[i + 1, j + 1, k]
    c001 = values[i, j, k + 1]
    c101 = values[i + 1, j, k + 1]
    c011 = values[i, j + 1, k + 1]
    c111 = values[i + 1, j + 1, k + 1]

    c00 = c000 * (1 - fx) + c100 * fx
    c10 = c010 * (1 - fx) + c110 * fx
    c01 = c001 * (1 - fx) + c101 * fx
    c11 = c011 * (1 - fx) + c111 * fx
    c0 = c00 * (1 - fy) + c10 * fy
    c1 = c01 * (1 - fy) + c11 * fy
    return c0 * (1 - fz) + c1 * fz


def sample_scalar(f: ScalarField, p) -> float:
    """Trilinear sample of a scalar field at a world-space point.

    Exactly reproduces stored node values when ``p`` is a grid node; raises
    :class:`OutOfDomainError` outside the closed domain bounds.
    """
    p = np.asarray(p, dtype=np.float64)
    if not f.grid.contains(p):
        raise OutOfDomainError(p)
    n = _exact_node(f.grid, p)
    if n is not None:
        return float(f.values[n[0], n[1], n[2]])
    return float(_trilinear_many(f.grid, f.values, p[None, :])[0])


def sample_vector(f: VectorField, p) -> np.ndarray:
    """Component-wise trilinear sample of a vector field at a world point."""
    p = np.asarray(p, dtype=np.float64)
    if not f.grid.contains(p):
        raise OutOfDomainError(p)
    n = _exact_node(f.grid, p)
    if n is not None:
        return np.array(f.values[n[0], n[1], n[2]], dtype=np.float64)
    return _trilinear_many(f.grid, f.values, p[None, :])[0]


def sample_scalar_many(f: ScalarField, pts: np.ndarray):
    """Vectorized scalar sampling: returns ``(values, inside_mask)``.

    Out-of-domain entries carry 0.0 and ``inside_mask`` False; no exception.
    """
    pts = np.asarray(pts, dtype=np.float64)
    inside = f.grid.contains_many(pts)
    out = np.zeros(len(pts), dtype=np.float64)
    if inside.any():
        out[inside] = _trilinear_many(f.grid, f.values, pts[inside])
    return out, inside


def sample_vector_many(f: VectorField, pts: np.ndarray):
    """Vectorized vector sampling: returns ``(values (n,3), inside_mask)``."""
    pts = np.asarray(pts, dtype=np.float64)
    inside = f.grid.contains_many(pts)
    out = np.zeros((len(pts), 3), dtype=np.float64)
    if inside.any():
        out[inside] = _trilinear_many(f.grid, f.values, pts[inside])
    return out, inside


# ---------------------------------------------------------------------------
# Dataset ingestion

_SCALAR_BYTES_PER_NODE = 4
_VECTOR_BYTES_PER_NODE = 12


def _manifest_list(m: dict, key: str, n: int, kind: type) -> tuple:
    v = m.get(key)
    if not isinstance(v, list) or len(v) != n or not all(isinstance(x, (int, float)) for x in v):
        raise ManifestParseError(f"manifest key {key!r} must be a list of {n} numbers")
    return tuple(kind(x) for x in v)


def _read_raw(path: Path, grid: GridSpec, ncomp: int | None):
    if not path.is_file():
        raise MissingFileError(f"raw data file not found: {path}")
    per_node = _SCALAR_BYTES_PER_NODE if ncomp is None else _VECTOR_BYTES_PER_NODE
    expected = grid.n_nodes * per_node
    got = os.path.getsize(path)
    if got != expected:
        raise TruncatedDataError(path, expected, got)
    raw = np.fromfile(path, dtype="<f4")
    nx, ny, nz = grid.dims
    if ncomp is None:
        arr = raw.reshape(nz, ny, nx).transpose(2, 1, 0)
    else:
        arr = raw.reshape(nz, ny, nx, 3).transpose(2, 1, 0, 3)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{path}: contains NaN/Inf voxels")
    return np.ascontiguousarray(arr, dtype=np.float64)


def load_dataset(manifest_path) -> FieldSet:
    """Load a dataset directory via its ``manifest.vf5`` JSON manifest.

    ``manifest_path`` may point at the manifest file or its directory.
    Raises :class:`ManifestParseError`, :class:`MissingFileError`,
    :class:`TruncatedDataError`, or :class:`NonFiniteError`.
    """
    path = Path(manifest_path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    if not path.is_file():
        raise MissingFileError(f"manifest not found: {path}")
    try:
        manifest = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ManifestParseError(f"{path}: {e}") from e
    if not isinstance(manifest, dict):
        raise ManifestParseError(f"{path}: manifest must be a JSON object")

    dims = _manifest_list(manifest, "dims", 3, int)
    origin = _manifest_list(manifest, "origin", 3, float)
    spacing = _manifest_list(manifest, "spacing", 3, float)
    steps = manifest.get("steps")
    if not isinstance(steps, int) or steps < 1:
        raise ManifestParseError("manifest key 'steps' must be an integer >= 1")
    try:
        grid = GridSpec(dims, origin, spacing)
    except ValueError as e:
        raise ManifestParseError(f"{path}: {e}") from e

    base = path.parent
    scalars: dict[str, list[ScalarField]] = {}
    vectors: dict[str, list[VectorField]] = {}
    for key, target in (("scalars", scalars), ("vectors", vectors)):
        entries = manifest.get(key, [])
        if not isinstance(entries, list):
            raise ManifestParseError(f"manifest key {key!r} must be a list")
        for entry in entries:
            if not isinstance(entry, dict) or "name" not in entry or "files" not in entry:
                raise ManifestParseError(f"each {key} entry needs 'name' and 'files'")
            name = entry["name"]
            files = entry["files"]
            if not isinstance(name, str) or not name:
                raise ManifestParseError(f"{key} entry has an invalid name")
            if not isinstance(files, list) or len(files) != steps:
                raise ManifestParseError(
                    f"field {name!r}: 'files' must list exactly {steps} per-step files"
                )
            if name in scalars or name in vectors:
                raise ManifestParseError(f"duplicate field name {name!r}")
            ncomp = None if key == "scalars" else 3
            arrays = [_read_raw(base / fn, grid, ncomp) for fn in files]
            if key == "scalars":
                target[name] = [ScalarField(grid, a) for a in arrays]
            else:
                target[name] = [VectorField(grid, a) for a in arrays]

    return FieldSet(grid=grid, steps=steps, scalars=scalars, vectors=vectors)


def save_dataset(fs: FieldSet, out_dir) -> Path:
    """Write a FieldSet as a dataset directory (inverse of load_dataset)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "dims": list(fs.grid.dims),
        "origin": list(fs.grid.origin),
        "spacing": list(fs.grid.spacing),
        "steps": fs.steps,
        "scalars": [],
        "vectors": [],
    }

    def _dump(arr: np.ndarray, fn: str, ncomp: int | None):
        if ncomp is None:
            flat = arr.transpose(2, 1, 0)
        else:
            flat = arr.transpose(2, 1, 0, 3)
        np.ascontiguousarray(flat, dtype="<f4").tofile(out / fn)

    for name, fields_ in fs.scalars.items():
        files = [f"{name}_{t:04d}.raw" for t in range(fs.steps)]
        for fn, fld in zip(files, fields_):
            _dump(fld.values, fn, None)
        manifest["scalars"].append({"name": name, "files": files})
    for name, fields_ in fs.vectors.items():
        files = [f"{name}_{t:04d}.raw" for t in range(fs.steps)]
        for fn, fld in zip(files, fields_):
            _dump(fld.values, fn, 3)
        manifest["vectors"].append({"name": name, "files": files})

    mpath = out / MANIFEST_NAME
    mpath.write_text(json.dumps(manifest, indent=2))
    return mpath
