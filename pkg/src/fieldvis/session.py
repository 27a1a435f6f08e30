"""Visualization recipes: validated method+parameter records applied per step.

A recipe is the persisted session state.  Baking executes every item against
every time step with identical parameters and serializes the results to
``frame_%04d.vfa`` files; the parameter file is human-editable JSON.

Baked geometry per method: tracers and field lines yield one polyline per
seed; local arrows yield one short segment per arrow (params carry the field
magnitude); snowflake and hotaru ensembles yield a point cloud encoded as a
polyline whose params are the particle index; isosurfaces yield meshes;
slice methods yield images; volume yields a VolumeTexture asset.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    InvalidParamsError,
    IoError,
    ParamParseError,
    UnknownFieldError,
    UnknownMethodError,
)
from .fields import FieldSet
from .frames import frame_filename, write_frame
from .isosurface import extract_isosurface
from .lod import (
    RoiContext,
    build_lod_pyramid,
    effective_scalar_field,
    effective_vector_field,
    max_pyramid_levels,
)
from .slicing import SliceMode, axis_plane, default_colormap, lic_slice, orient_local_slice, orthoslice, sample_slice_scalar
from .tracing import (
    Ensemble,
    Polyline,
    TraceOptions,
    advect_ensemble_euler,
    local_arrows,
    scatter_ensemble,
    seed_cone,
    trace_field_line,
    trace_streamline,
)
from .volume import TransferFunction, build_volume_texture


class Method(enum.Enum):
    TRACER = "Tracer"
    FIELD_LINE = "FieldLine"
    LOCAL_ARROWS = "LocalArrows"
    SNOWFLAKES = "Snowflakes"
    HOTARU = "Hotaru"
    ISOSURFACE = "Isosurface"
    ORTHOSLICE = "Orthoslice"
    LOCAL_SLICE = "LocalSlice"
    LIC = "LIC"
    VOLUME = "Volume"


_SCALAR_METHODS = {Method.ISOSURFACE, Method.ORTHOSLICE, Method.LOCAL_SLICE, Method.VOLUME}

DEFAULT_ARROW_COUNT = 20
DEFAULT_SNOWFLAKE_COUNT = 300
DEFAULT_HOTARU_COUNT = 2000
DEFAULT_SUBSTEPS = 5


def _jsonify(value):
    """Normalize params to JSON-native types so save/load is an identity."""
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonify(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): _jsonify(v) for k, v in value.items()}
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (str, bool, int, float)) or value is None:
        return value
    raise InvalidParamsError(f"parameter value {value!r} is not JSON-representable")


@dataclass(frozen=True)
class RecipeItem:
    method: Method
    field_name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.method, Method):
            try:
                object.__setattr__(self, "method", Method(self.method))
            except ValueError:
                raise UnknownMethodError(f"unknown method {self.method!r}") from None
        object.__setattr__(self, "params", _jsonify(dict(self.params)))

    def to_json_dict(self) -> dict:
        return {"method": self.method.value, "field": self.field_name, "params": self.params}

    @staticmethod
    def from_json_dict(d: dict) -> "RecipeItem":
        if not isinstance(d, dict):
            raise ParamParseError("recipe item must be an object")
        if "method" not in d or "field" not in d:
            raise ParamParseError("recipe item needs 'method' and 'field'")
        params = d.get("params", {})
        if not isinstance(params, dict):
            raise ParamParseError("item 'params' must be an object")
        return RecipeItem(method=d["method"], field_name=d["field"], params=params)


@dataclass(frozen=True)
class VisRecipe:
    items: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))

    def __len__(self) -> int:
        return len(self.items)

    def validate(self, fs: FieldSet) -> None:
        for item in self.items:
            validate_item(fs, item)


# ---------------------------------------------------------------------------
# Parameter validation


def _need(params, key, item):
    if key not in params:
        raise InvalidParamsError(f"{item.method.value}: missing parameter {key!r}")
    return params[key]


def _point(v, what):
    if not (isinstance(v, list) and len(v) == 3 and all(isinstance(c, (int, float)) for c in v)):
        raise InvalidParamsError(f"{what} must be a 3-component point")
    return np.array(v, dtype=np.float64)


def _positive(v, what):
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
        raise InvalidParamsError(f"{what} must be a positive number")
    return float(v)


def _count(v, what):
    if not (isinstance(v, int) and v >= 0):
        raise InvalidParamsError(f"{what} must be a non-negative integer")
    return v


def _pair(v, what):
    if not (isinstance(v, list) and len(v) == 2):
        raise InvalidParamsError(f"{what} must be a 2-element list")
    return v


_ALLOWED_KEYS = {
    Method.TRACER: {"seeds", "step_factor", "max_steps", "max_time", "stagnation_eps"},
    Method.FIELD_LINE: {"seeds", "step_factor", "max_steps", "stagnation_eps"},
    Method.LOCAL_ARROWS: {"center", "radius", "count", "rng_seed"},
    Method.SNOWFLAKES: {
        "apex", "direction", "half_angle", "length", "count", "rng_seed", "dt", "substeps",
    },
    Method.HOTARU: {"count", "rng_seed", "dt", "substeps"},
    Method.ISOSURFACE: {"level"},
    Method.ORTHOSLICE: {"axis", "index", "cmap", "range"},
    Method.LOCAL_SLICE: {
        "mode", "center", "size", "res", "wand_dir", "orient_field", "cmap", "range",
    },
    Method.LIC: {"axis", "index", "res", "kernel_half_len", "noise_seed"},
    Method.VOLUME: {"tf"},
}


def validate_item(fs: FieldSet, item: RecipeItem) -> None:
    """Check an item against the dataset: field exists, kind and params fit."""
    name = item.field_name
    if name not in fs.scalars and name not in fs.vectors:
        raise UnknownFieldError(f"dataset has no field named {name!r}")
    wants_scalar = item.method in _SCALAR_METHODS
    if wants_scalar and name not in fs.scalars:
        raise InvalidParamsError(f"{item.method.value} needs a scalar field, {name!r} is a vector")
    if not wants_scalar and name not in fs.vectors:
        raise InvalidParamsError(f"{item.method.value} needs a vector field, {name!r} is a scalar")

    p = item.params
    unknown = set(p) - _ALLOWED_KEYS[item.method]
    if unknown:
        raise InvalidParamsError(f"{item.method.value}: unknown parameters {sorted(unknown)}")

    m = item.method
    if m in (Method.TRACER, Method.FIELD_LINE):
        seeds = _need(p, "seeds", item)
        if not isinstance(seeds, list) or not seeds:
            raise InvalidParamsError("seeds must be a non-empty list of points")
        for s in seeds:
            _point(s, "seed")
        for k in ("step_factor", "max_time", "stagnation_eps"):
            if k in p:
                _positive(p[k], k)
        if "max_steps" in p and not (isinstance(p["max_steps"], int) and p["max_steps"] >= 1):
            raise InvalidParamsError("max_steps must be an integer >= 1")
    elif m is Method.LOCAL_ARROWS:
        _point(_need(p, "center", item), "center")
        if "radius" in p:
            _positive(p["radius"], "radius")
        if "count" in p:
            _count(p["count"], "count")
    elif m is Method.SNOWFLAKES:
        _point(_need(p, "apex", item), "apex")
        d = _point(_need(p, "direction", item), "direction")
        if np.linalg.norm(d) == 0:
            raise InvalidParamsError("direction must be non-zero")
        if "half_angle" in p and not 0 < p["half_angle"] < math.pi / 2:
            raise InvalidParamsError("half_angle must be in (0, pi/2)")
        for k in ("length", "dt"):
            if k in p:
                _positive(p[k], k)
        for k in ("count", "substeps"):
            if k in p:
                _count(p[k], k)
    elif m is Method.HOTARU:
        for k in ("count", "substeps"):
            if k in p:
                _count(p[k], k)
        if "dt" in p:
            _positive(p["dt"], "dt")
    elif m is Method.ISOSURFACE:
        level = _need(p, "level", item)
        if not (isinstance(level, (int, float)) and math.isfinite(level)):
            raise InvalidParamsError("level must be a finite number")
    elif m in (Method.ORTHOSLICE, Method.LIC):
        axis = _need(p, "axis", item)
        if axis not in ("x", "y", "z"):
            raise InvalidParamsError("axis must be 'x', 'y', or 'z'")
        idx = _need(p, "index", item)
        ax = "xyz".index(axis)
        if not (isinstance(idx, int) and 0 <= idx < fs.grid.dims[ax]):
            raise InvalidParamsError(
                f"index must be an integer in [0, {fs.grid.dims[ax]}) for axis {axis}"
            )
        if m is Method.LIC:
            if "res" in p:
                _pair(p["res"], "res")
            if "kernel_half_len" in p:
                _count(p["kernel_half_len"], "kernel_half_len")
    elif m is Method.LOCAL_SLICE:
        mode = _need(p, "mode", item)
        if mode not in ("wand_perp", "field_perp"):
            raise InvalidParamsError("mode must be 'wand_perp' or 'field_perp'")
        _point(_need(p, "center", item), "center")
        size = _pair(_need(p, "size", item), "size")
        for c in size:
            _positive(c, "size component")
        if "res" in p:
            _pair(p["res"], "res")
        if mode == "wand_perp":
            _point(_need(p, "wand_dir", item), "wand_dir")
        else:
            of = _need(p, "orient_field", item)
            if of not in fs.vectors:
                raise UnknownFieldError(f"orient_field {of!r} is not a vector field")
    elif m is Method.VOLUME:
        tf = _need(p, "tf", item)
        try:
            TransferFunction(tuple((s, tuple(rgba)) for s, rgba in tf))
        except (TypeError, ValueError) as e:
            raise InvalidParamsError(f"invalid transfer function: {e}") from None


# ---------------------------------------------------------------------------
# Execution


class _LodCache:
    """Per-run cache of LOD pyramids keyed by (field name, step)."""

    def __init__(self, roi: RoiContext | None):
        self.roi = roi
        self._pyramids = {}

    def scalar(self, fs, name, step):
        f = fs.scalar(name, step)
        if self.roi is None:
            return f
        return effective_scalar_field(self._pyramid(f, name, step), self.roi)

    def vector(self, fs, name, step):
        f = fs.vector(name, step)
        if self.roi is None:
            return f
        return effective_vector_field(self._pyramid(f, name, step), self.roi)

    def _pyramid(self, f, name, step):
        key = (name, step)
        if key not in self._pyramids:
            self._pyramids[key] = build_lod_pyramid(f, max_levels=self.roi.outside_level + 1)
        return self._pyramids[key]


def check_roi(fs: FieldSet, roi: RoiContext) -> None:
    if not roi.intersects(fs.grid):
        raise InvalidParamsError("ROI box does not intersect the domain")
    if roi.outside_level >= max_pyramid_levels(fs.grid.dims):
        raise InvalidParamsError(
            f"outside_level {roi.outside_level} too deep for dims {fs.grid.dims}"
        )


def _point_cloud(positions: np.ndarray) -> list:
    if len(positions) == 0:
        return []
    return [Polyline(positions, np.arange(len(positions), dtype=np.float64))]


def _trace_opts(p, allow_max_time=True) -> TraceOptions:
    kw = {}
    if "step_factor" in p:
        kw["step_factor"] = p["step_factor"]
    if "max_steps" in p:
        kw["max_steps"] = p["max_steps"]
    if "stagnation_eps" in p:
        kw["stagnation_eps"] = p["stagnation_eps"]
    if allow_max_time and "max_time" in p:
        kw["max_time"] = p["max_time"]
    return TraceOptions(**kw)


def _default_dt(vec) -> float:
    rms = vec.rms_magnitude
    if rms == 0.0:
        return 0.0
    return vec.grid.min_spacing / rms


def _advect(vec, positions, rng_seed, p):
    substeps = p.get("substeps", DEFAULT_SUBSTEPS)
    dt = p.get("dt", _default_dt(vec))
    if len(positions) == 0 or dt == 0.0 or substeps == 0:
        return positions
    grid = vec.grid
    ens = Ensemble(
        positions, np.zeros(len(positions)), rng_seed,
        (tuple(grid.bounds_min), tuple(grid.bounds_max)),
    )
    for _ in range(substeps):
        ens = advect_ensemble_euler(vec, ens, dt)
    return ens.positions


def execute_item(fs: FieldSet, step: int, item: RecipeItem,
                 roi: RoiContext | None = None, lod: _LodCache | None = None) -> list:
    """Run one recipe item against the given time step; returns geometry objects."""
    validate_item(fs, item)
    if lod is None:
        lod = _LodCache(roi)
    p = item.params
    m = item.method
    grid = fs.grid

    if m is Method.TRACER:
        vec = lod.vector(fs, item.field_name, step)
        opts = _trace_opts(p)
        return [trace_streamline(vec, seed, opts) for seed in p["seeds"]]

    if m is Method.FIELD_LINE:
        vec = lod.vector(fs, item.field_name, step)
        opts = _trace_opts(p, allow_max_time=False)
        return [trace_field_line(vec, seed, opts) for seed in p["seeds"]]

    if m is Method.LOCAL_ARROWS:
        vec = lod.vector(fs, item.field_name, step)
        arrows = local_arrows(
            vec, _point(p["center"], "center"),
            radius=p.get("radius"),
            n=p.get("count", DEFAULT_ARROW_COUNT),
            rng_seed=p.get("rng_seed", 0),
        )
        mags = np.linalg.norm(arrows.vectors, axis=1)
        top = mags.max(initial=0.0)
        if top == 0.0:
            return []
        scale = 0.5 * arrows.radius / top
        out = []
        for pos, v, mag, ok in zip(arrows.positions(), arrows.vectors, mags, arrows.valid):
            if ok and mag > 0.0:
                out.append(Polyline(np.stack([pos, pos + scale * v]), np.array([0.0, mag])))
        return out

    if m is Method.SNOWFLAKES:
        vec = lod.vector(fs, item.field_name, step)
        pts = seed_cone(
            _point(p["apex"], "apex"),
            _point(p["direction"], "direction"),
            p.get("half_angle", 0.35),
            p.get("length", 0.25 * grid.diagonal),
            p.get("count", DEFAULT_SNOWFLAKE_COUNT),
            p.get("rng_seed", 0),
            grid,
        )
        return _point_cloud(_advect(vec, pts, p.get("rng_seed", 0), p))

    if m is Method.HOTARU:
        vec = lod.vector(fs, item.field_name, step)
        ens = scatter_ensemble(grid, p.get("count", DEFAULT_HOTARU_COUNT), p.get("rng_seed", 0))
        return _point_cloud(_advect(vec, ens.positions, p.get("rng_seed", 0), p))

    if m is Method.ISOSURFACE:
        scalar = lod.scalar(fs, item.field_name, step)
        return [extract_isosurface(scalar, p["level"])]

    if m is Method.ORTHOSLICE:
        scalar = lod.scalar(fs, item.field_name, step)
        lo, hi = p.get("range", (scalar.min, scalar.max))
        cmap = default_colormap(p.get("cmap", "gray"), lo, hi)
        return [orthoslice(scalar, p["axis"], p["index"], cmap)]

    if m is Method.LOCAL_SLICE:
        scalar = lod.scalar(fs, item.field_name, step)
        lo, hi = p.get("range", (scalar.min, scalar.max))
        cmap = default_colormap(p.get("cmap", "gray"), lo, hi)
        center = _point(p["center"], "center")
        size = p["size"]
        if p["mode"] == "wand_perp":
            plane = orient_local_slice(
                SliceMode.WAND_PERP, _point(p["wand_dir"], "wand_dir"), None, center, size
            )
        else:
            orient_vec = lod.vector(fs, p["orient_field"], step)
            plane = orient_local_slice(SliceMode.FIELD_PERP, None, orient_vec, center, size)
        res = p.get("res", [64, 64])
        return [sample_slice_scalar(scalar, plane, res, cmap)]

    if m is Method.LIC:
        vec = lod.vector(fs, item.field_name, step)
        plane = axis_plane(grid, p["axis"], p["index"])
        res = p.get("res", [128, 128])
        return [
            lic_slice(vec, plane, res, p.get("kernel_half_len", 20), p.get("noise_seed", 0))
        ]

    if m is Method.VOLUME:
        scalar = lod.scalar(fs, item.field_name, step)
        tf = TransferFunction(tuple((s, tuple(rgba)) for s, rgba in p["tf"]))
        return [build_volume_texture(scalar, tf)]

    raise UnknownMethodError(f"unhandled method {m}")  # pragma: no cover


def execute_recipe(fs: FieldSet, step: int, recipe: VisRecipe,
                   roi: RoiContext | None = None) -> list:
    lod = _LodCache(roi)
    objects = []
    for item in recipe.items:
        objects.extend(execute_item(fs, step, item, roi, lod))
    return objects


def bake_animation(fs: FieldSet, recipe: VisRecipe, out_dir,
                   roi: RoiContext | None = None) -> int:
    """Execute the recipe at every time step and write frame_%04d.vfa files.

    Returns the number of frames written (= fs.steps).
    """
    recipe.validate(fs)
    if roi is not None:
        check_roi(fs, roi)
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IoError(f"cannot create {out}: {e}") from e
    for t in range(fs.steps):
        objects = execute_recipe(fs, t, recipe, roi)
        write_frame(out / frame_filename(t), objects)
    return fs.steps


# ---------------------------------------------------------------------------
# Parameter persistence


def save_params(recipe: VisRecipe, roi: RoiContext | None, path) -> Path:
    doc = {"items": [item.to_json_dict() for item in recipe.items]}
    if roi is not None:
        doc["roi"] = {
            "min": list(roi.roi_min),
            "max": list(roi.roi_max),
            "outside_level": roi.outside_level,
        }
    else:
        doc["roi"] = None
    path = Path(path)
    try:
        path.write_text(json.dumps(doc, indent=2))
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from e
    return path


def load_params(path) -> tuple[VisRecipe, RoiContext | None]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ParamParseError(f"cannot read parameter file {path}: {e}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParamParseError(f"{path}: {e}") from e
    if not isinstance(doc, dict) or "items" not in doc or not isinstance(doc["items"], list):
        raise ParamParseError(f"{path}: expected an object with an 'items' list")
    items = tuple(RecipeItem.from_json_dict(d) for d in doc["items"])
    roi_doc = doc.get("roi")
    roi = None
    if roi_doc is not None:
        if not isinstance(roi_doc, dict) or "min" not in roi_doc or "max" not in roi_doc:
            raise ParamParseError(f"{path}: roi needs 'min' and 'max'")
        try:
            roi = RoiContext(
                tuple(roi_doc["min"]), tuple(roi_doc["max"]),
                roi_doc.get("outside_level", 1),
            )
        except (TypeError, ValueError) as e:
            raise ParamParseError(f"{path}: bad roi: {e}") from e
    return VisRecipe(items), roi
