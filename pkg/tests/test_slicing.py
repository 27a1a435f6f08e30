import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fieldvis.errors import DegenerateNormalError, IndexOutOfRangeError
from fieldvis.fields import GridSpec, ScalarField
from fieldvis.slicing import (
    Colormap,
    SliceMode,
    SlicePlane,
    axis_plane,
    lic_noise,
    lic_slice,
    orient_local_slice,
    orthoslice,
    sample_slice_scalar,
)

from conftest import scalar_from, vector_from


@pytest.fixture
def grid():
    return GridSpec(dims=(4, 5, 6), origin=(0, 0, 0), spacing=(1 / 3, 0.25, 0.2))


def gray(smin=0.0, smax=1.0):
    return Colormap.grayscale(smin, smax)


def test_orthoslice_constant(grid):
    f = scalar_from(grid, lambda X, Y, Z: np.full_like(X, 0.5))
    img = orthoslice(f, "z", 2, gray())
    assert (img.width, img.height) == (4, 5)
    expected = gray().rgb(np.array([0.5]))[0]
    assert np.all(img.pixels[..., :3] == expected)
    assert np.all(img.pixels[..., 3] == 255)


def test_orthoslice_axis_x_layout(grid):
    rng = np.random.default_rng(0)
    f = ScalarField(grid, rng.random(grid.dims))
    img = orthoslice(f, "x", 0, gray())
    assert (img.width, img.height) == (5, 6)  # (ny, nz)
    cm = gray()
    for j in [0, 2, 4]:
        for k in [0, 3, 5]:
            assert tuple(img.pixels[k, j, :3]) == tuple(cm.rgb(f.values[0, j, k]))


def test_orthoslice_index_range(grid):
    f = scalar_from(grid, lambda X, Y, Z: X)
    with pytest.raises(IndexOutOfRangeError):
        orthoslice(f, "x", 4, gray())


def test_colormap_degenerate_range():
    cm = Colormap.grayscale(1.0, 1.0)
    assert np.all(cm.indices(np.array([0.0, 1.0, 5.0])) == 128)


def test_orient_wand_perp(grid):
    pl = orient_local_slice(SliceMode.WAND_PERP, (0, 0, 1), None, (0.5, 0.5, 0.5), (0.4, 0.2))
    assert np.allclose(pl.normal, [0, 0, 1])
    assert pl.extent == (0.4, 0.2)


def test_orient_field_perp(grid):
    vec = vector_from(grid, lambda X, Y, Z: (np.zeros_like(X), np.ones_like(Y), np.zeros_like(Z)))
    pl = orient_local_slice("field_perp", None, vec, (0.5, 0.5, 0.5), (0.3, 0.3))
    assert np.allclose(pl.normal, [0, 1, 0])


def test_orient_degenerate(grid):
    vec = vector_from(grid, lambda X, Y, Z: (np.zeros_like(X),) * 3)
    with pytest.raises(DegenerateNormalError):
        orient_local_slice(SliceMode.FIELD_PERP, None, vec, (0.5, 0.5, 0.5), (0.3, 0.3))


@settings(max_examples=50, deadline=None)
@given(n=st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)))
def test_orient_frame_orthonormal(n):
    v = np.array(n)
    if np.linalg.norm(v) < 1e-3:
        return
    v /= np.linalg.norm(v)
    pl = orient_local_slice(SliceMode.WAND_PERP, v, None, (0, 0, 0), (1, 1))
    # SlicePlane.__post_init__ already enforces orthonormal right-handed to 1e-9
    assert abs(np.dot(pl.u_axis, pl.v_axis)) <= 1e-9
    assert np.linalg.norm(np.cross(pl.u_axis, pl.v_axis) - pl.normal) <= 1e-9


@pytest.mark.parametrize("axis", ["x", "y", "z"])
def test_sample_slice_matches_orthoslice(grid, axis):
    f = scalar_from(grid, lambda X, Y, Z: 0.3 + 0.11 * X + 0.07 * Y - 0.05 * Z)
    cm = gray(f.min, f.max)
    idx = 1
    direct = orthoslice(f, axis, idx, cm)
    pl = axis_plane(grid, axis, idx)
    resampled = sample_slice_scalar(f, pl, (direct.width, direct.height), cm)
    assert np.all(resampled.pixels[..., 3] == 255)
    diff = direct.pixels[..., :3].astype(int) - resampled.pixels[..., :3].astype(int)
    assert np.abs(diff).max() <= 1


def test_sample_slice_outside_transparent(grid):
    f = scalar_from(grid, lambda X, Y, Z: X)
    pl = SlicePlane(
        origin=(10.0, 10.0, 10.0),
        u_axis=(1, 0, 0),
        v_axis=(0, 1, 0),
        normal=(0, 0, 1),
        extent=(1, 1),
    )
    img = sample_slice_scalar(f, pl, (8, 8), gray())
    assert np.all(img.pixels == 0)


def test_sample_slice_constant_uniform(grid):
    f = scalar_from(grid, lambda X, Y, Z: np.full_like(X, 2.0))
    pl = orient_local_slice(SliceMode.WAND_PERP, (0, 0, 1), None, (0.5, 0.5, 0.5), (0.2, 0.2))
    img = sample_slice_scalar(f, pl, (9, 7), Colormap.grayscale(0, 4))
    inside = img.pixels[..., 3] == 255
    assert inside.all()
    assert len(np.unique(img.pixels[..., 0])) == 1


# --- LIC ---


def unit_square_plane(z=0.5):
    return SlicePlane(
        origin=(0.0, 0.0, z),
        u_axis=(1, 0, 0),
        v_axis=(0, 1, 0),
        normal=(0, 0, 1),
        extent=(1.0, 1.0),
    )


@pytest.fixture
def ugrid():
    return GridSpec(dims=(9, 9, 9), origin=(0, 0, 0), spacing=(0.125, 0.125, 0.125))


def test_lic_zero_field_is_noise(ugrid):
    vec = vector_from(ugrid, lambda X, Y, Z: (np.zeros_like(X),) * 3)
    img = lic_slice(vec, unit_square_plane(), (64, 48), kernel_half_len=10, noise_seed=3)
    noise = lic_noise((64, 48), 3)
    assert np.array_equal(img.pixels[..., 0], noise)
    assert np.array_equal(img.pixels[..., 0], img.pixels[..., 1])


def row_box_filter(noise, k):
    n = noise.astype(np.float64)
    h, w = n.shape
    c = np.zeros((h, w + 1))
    c[:, 1:] = np.cumsum(n, axis=1)
    out = np.empty((h, w))
    for a in range(w):
        lo, hi = max(0, a - k), min(w - 1, a + k)
        out[:, a] = (c[:, hi + 1] - c[:, lo]) / (hi - lo + 1)
    return out


def lag1_corr(img, axis):
    x = img.astype(np.float64)
    a = (x[:, :-1] if axis == 0 else x[:-1, :]).ravel()
    b = (x[:, 1:] if axis == 0 else x[1:, :]).ravel()
    a = a - a.mean()
    b = b - b.mean()
    return float((a * b).sum() / np.sqrt((a * a).sum() * (b * b).sum()))


def test_lic_uniform_field_is_row_box_filter(ugrid):
    vec = vector_from(
        ugrid, lambda X, Y, Z: (np.ones_like(X), np.zeros_like(Y), np.zeros_like(Z))
    )
    k = 12
    img = lic_slice(vec, unit_square_plane(), (128, 128), kernel_half_len=k, noise_seed=7)
    noise = lic_noise((128, 128), 7)
    expected = np.rint(row_box_filter(noise, k)).astype(np.uint8)
    assert np.array_equal(img.pixels[..., 0], expected)
    ratio = lag1_corr(img.pixels[..., 0], 0) / max(abs(lag1_corr(img.pixels[..., 0], 1)), 1e-12)
    assert ratio >= 5


def test_lic_deterministic(ugrid):
    vec = vector_from(
        ugrid, lambda X, Y, Z: (np.ones_like(X), np.ones_like(Y), np.zeros_like(Z))
    )
    a = lic_slice(vec, unit_square_plane(), (64, 64), 15, noise_seed=11)
    b = lic_slice(vec, unit_square_plane(), (64, 64), 15, noise_seed=11)
    assert a.to_bytes() == b.to_bytes()


def streak_angle_deg(img, lag=6.0):
    """Dominant autocorrelation axis: angle maximizing autocorr at a fixed lag."""
    x = img.astype(np.float64) - img.mean()
    spectrum = np.abs(np.fft.fft2(x)) ** 2
    ac = np.fft.ifft2(spectrum).real
    ac /= ac[0, 0]
    h, w = x.shape
    best_val, best_deg = -2.0, 0.0
    for deg in np.arange(0.0, 180.0, 1.0):
        t = np.deg2rad(deg)
        dx, dy = lag * np.cos(t), lag * np.sin(t)
        i0, j0 = int(np.floor(dy)) % h, int(np.floor(dx)) % w
        fi, fj = dy - np.floor(dy), dx - np.floor(dx)
        i1, j1 = (i0 + 1) % h, (j0 + 1) % w
        val = (
            ac[i0, j0] * (1 - fi) * (1 - fj)
            + ac[i1, j0] * fi * (1 - fj)
            + ac[i0, j1] * (1 - fi) * fj
            + ac[i1, j1] * fi * fj
        )
        if val > best_val:
            best_val, best_deg = val, deg
    return best_deg


@pytest.mark.parametrize("field_deg", [0.0, 30.0, 63.0, 90.0, 151.0])
def test_lic_streaks_align_with_field(ugrid, field_deg):
    ang = np.deg2rad(field_deg)
    cx, cy = np.cos(ang), np.sin(ang)
    vec = vector_from(
        ugrid,
        lambda X, Y, Z: (np.full_like(X, cx), np.full_like(Y, cy), np.zeros_like(Z)),
    )
    img = lic_slice(vec, unit_square_plane(), (128, 128), kernel_half_len=20, noise_seed=1)
    got = streak_angle_deg(img.pixels[..., 0])
    diff = abs(got - field_deg) % 180
    assert min(diff, 180 - diff) <= 5.0


def test_lic_projection_drops_normal_component(ugrid):
    # pure out-of-plane field behaves like zero field on the slice
    vec = vector_from(
        ugrid, lambda X, Y, Z: (np.zeros_like(X), np.zeros_like(Y), np.ones_like(Z))
    )
    img = lic_slice(vec, unit_square_plane(), (32, 32), kernel_half_len=8, noise_seed=5)
    assert np.array_equal(img.pixels[..., 0], lic_noise((32, 32), 5))
