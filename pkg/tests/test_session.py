import numpy as np
import pytest

from fieldvis.errors import (
    InvalidParamsError,
    ParamParseError,
    UnknownFieldError,
    UnknownMethodError,
)
from fieldvis.fields import FieldSet, GridSpec, ScalarField, VectorField
from fieldvis.frames import encode_frame, frame_filename, load_baked_frame
from fieldvis.isosurface import extract_isosurface
from fieldvis.lod import RoiContext
from fieldvis.session import (
    Method,
    RecipeItem,
    VisRecipe,
    bake_animation,
    execute_item,
    execute_recipe,
    load_params,
    save_params,
    validate_item,
)

from conftest import grid_coords


def make_fieldset(steps=1, n=8, identical=False):
    g = GridSpec(dims=(n, n, n), origin=(-1, -1, -1), spacing=(2 / (n - 1),) * 3)
    X, Y, Z = grid_coords(g)
    scalars, vectors = [], []
    for t in range(steps):
        bump = 0.0 if identical else 0.1 * t
        scalars.append(ScalarField(g, X * X + Y * Y + Z * Z + bump))
        v = np.stack([-Y, X, np.full_like(Z, 0.05 + bump)], axis=-1)
        vectors.append(VectorField(g, v))
    return FieldSet(grid=g, steps=steps, scalars={"energy": scalars}, vectors={"flow": vectors})


def full_recipe():
    """One item of every method, exercising every executor."""
    return VisRecipe(
        (
            RecipeItem(Method.TRACER, "flow", {"seeds": [[0.5, 0.0, 0.0]], "max_steps": 50}),
            RecipeItem(Method.FIELD_LINE, "flow", {"seeds": [[0.5, 0.0, 0.0]], "max_steps": 50}),
            RecipeItem(Method.LOCAL_ARROWS, "flow", {"center": [0.0, 0.0, 0.0], "count": 8}),
            RecipeItem(
                Method.SNOWFLAKES,
                "flow",
                {"apex": [0.0, 0.0, 0.0], "direction": [1.0, 0.0, 0.0], "count": 20,
                 "substeps": 2},
            ),
            RecipeItem(Method.HOTARU, "flow", {"count": 30, "substeps": 2}),
            RecipeItem(Method.ISOSURFACE, "energy", {"level": 0.5}),
            RecipeItem(Method.ORTHOSLICE, "energy", {"axis": "z", "index": 3}),
            RecipeItem(
                Method.LOCAL_SLICE,
                "energy",
                {"mode": "wand_perp", "center": [0.0, 0.0, 0.0], "size": [0.5, 0.5],
                 "wand_dir": [0.0, 0.0, 1.0], "res": [16, 16]},
            ),
            RecipeItem(Method.LIC, "flow", {"axis": "z", "index": 3, "res": [32, 32],
                                            "kernel_half_len": 5}),
            RecipeItem(
                Method.VOLUME,
                "energy",
                {"tf": [[0.0, [0, 0, 0, 0]], [3.0, [1.0, 0.5, 0.2, 0.8]]]},
            ),
        )
    )


def test_validation_unknown_method():
    with pytest.raises(UnknownMethodError):
        RecipeItem("Foo", "energy", {})


def test_validation_unknown_field():
    fs = make_fieldset()
    with pytest.raises(UnknownFieldError):
        validate_item(fs, RecipeItem(Method.ISOSURFACE, "missing", {"level": 0.5}))


def test_validation_wrong_kind():
    fs = make_fieldset()
    with pytest.raises(InvalidParamsError):
        validate_item(fs, RecipeItem(Method.ISOSURFACE, "flow", {"level": 0.5}))
    with pytest.raises(InvalidParamsError):
        validate_item(fs, RecipeItem(Method.TRACER, "energy", {"seeds": [[0, 0, 0]]}))


def test_validation_params():
    fs = make_fieldset()
    with pytest.raises(InvalidParamsError):
        validate_item(fs, RecipeItem(Method.ISOSURFACE, "energy", {}))
    with pytest.raises(InvalidParamsError):
        validate_item(fs, RecipeItem(Method.ISOSURFACE, "energy", {"level": 0.5, "bogus": 1}))
    with pytest.raises(InvalidParamsError):
        validate_item(fs, RecipeItem(Method.ORTHOSLICE, "energy", {"axis": "w", "index": 0}))
    with pytest.raises(InvalidParamsError):
        validate_item(fs, RecipeItem(Method.ORTHOSLICE, "energy", {"axis": "x", "index": 99}))


def test_every_method_executes():
    fs = make_fieldset()
    objs = execute_recipe(fs, 0, full_recipe())
    assert len(objs) >= 10


def test_item_equals_direct_kernel_call():
    fs = make_fieldset()
    item = RecipeItem(Method.ISOSURFACE, "energy", {"level": 0.5})
    (mesh,) = execute_item(fs, 0, item)
    direct = extract_isosurface(fs.scalar("energy", 0), 0.5)
    assert encode_frame([mesh]) == encode_frame([direct])


def test_bake_one_step_isosurface(tmp_path):
    fs = make_fieldset(steps=1)
    recipe = VisRecipe((RecipeItem(Method.ISOSURFACE, "energy", {"level": 0.5}),))
    n = bake_animation(fs, recipe, tmp_path)
    assert n == 1
    frame = load_baked_frame(tmp_path / frame_filename(0))
    direct = extract_isosurface(fs.scalar("energy", 0), 0.5)
    assert encode_frame(frame.objects) == encode_frame([direct])


def test_bake_empty_recipe(tmp_path):
    fs = make_fieldset(steps=3)
    n = bake_animation(fs, VisRecipe(()), tmp_path)
    assert n == 3
    for t in range(3):
        frame = load_baked_frame(tmp_path / frame_filename(t))
        assert frame.objects == ()


def test_bake_identical_steps_identical_bytes(tmp_path):
    fs = make_fieldset(steps=3, identical=True)
    bake_animation(fs, full_recipe(), tmp_path)
    blobs = [(tmp_path / frame_filename(t)).read_bytes() for t in range(3)]
    assert blobs[0] == blobs[1] == blobs[2]
    assert len(blobs[0]) > 100


def test_bake_live_equivalence(tmp_path):
    fs = make_fieldset(steps=2)
    recipe = full_recipe()
    bake_animation(fs, recipe, tmp_path)
    for t in range(2):
        live = execute_recipe(fs, t, recipe)
        baked = (tmp_path / frame_filename(t)).read_bytes()
        assert encode_frame(live) == baked


def test_bake_with_roi_covering_domain_identical(tmp_path):
    fs = make_fieldset(steps=1)
    g = fs.grid
    recipe = VisRecipe(
        (
            RecipeItem(Method.ISOSURFACE, "energy", {"level": 0.5}),
            RecipeItem(Method.ORTHOSLICE, "energy", {"axis": "x", "index": 2}),
            RecipeItem(Method.TRACER, "flow", {"seeds": [[0.5, 0.0, 0.0]], "max_steps": 40}),
        )
    )
    full = RoiContext(tuple(g.bounds_min), tuple(g.bounds_max), outside_level=1)
    plain = encode_frame(execute_recipe(fs, 0, recipe))
    lodded = encode_frame(execute_recipe(fs, 0, recipe, roi=full))
    assert plain == lodded


def test_execute_with_partial_roi_differs():
    fs = make_fieldset(steps=1)
    recipe = VisRecipe((RecipeItem(Method.ISOSURFACE, "energy", {"level": 0.5}),))
    roi = RoiContext((-1, -1, -1), (0, 0, 0), outside_level=1)
    plain = encode_frame(execute_recipe(fs, 0, recipe))
    lodded = encode_frame(execute_recipe(fs, 0, recipe, roi=roi))
    assert plain != lodded


# --- parameter persistence ---


def test_params_roundtrip_every_method(tmp_path):
    recipe = full_recipe()
    roi = RoiContext((-0.5, -0.5, -0.5), (0.5, 0.5, 0.5), 1)
    path = save_params(recipe, roi, tmp_path / "params.json")
    back, roi_back = load_params(path)
    assert back == recipe
    assert roi_back == roi


def test_params_roundtrip_no_roi(tmp_path):
    recipe = VisRecipe(
        (
            RecipeItem(Method.ISOSURFACE, "energy", {"level": 0.5}),
            RecipeItem(
                Method.TRACER, "flow",
                {"seeds": [[0.1, 0.2, 0.3], [0.4, 0.5, 0.6]]},
            ),
        )
    )
    path = save_params(recipe, None, tmp_path / "p.json")
    back, roi = load_params(path)
    assert back == recipe and roi is None


def test_params_unknown_method(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"items": [{"method": "Foo", "field": "energy", "params": {}}]}')
    with pytest.raises(UnknownMethodError):
        load_params(path)


def test_params_parse_errors(tmp_path):
    bad = tmp_path / "notjson.json"
    bad.write_text("{oops")
    with pytest.raises(ParamParseError):
        load_params(bad)
    missing = tmp_path / "missing.json"
    with pytest.raises(ParamParseError):
        load_params(missing)
    shape = tmp_path / "shape.json"
    shape.write_text('{"nope": 1}')
    with pytest.raises(ParamParseError):
        load_params(shape)


def test_params_empty_recipe(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text('{"items": []}')
    recipe, roi = load_params(path)
    assert len(recipe) == 0 and roi is None
