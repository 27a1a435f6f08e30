"""Slice planes: orthoslices, local slicer orientation, and slice-plane LIC.

A slice image is RGBA, row-major from the plane's (u, v) origin.  Pixel
centers sample at ``origin + ((a+0.5)/w)*width*u + ((b+0.5)/h)*height*v``;
pixels whose world point leaves the domain come out fully transparent
(plain slices) or keep their own noise value (LIC).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateNormalError, IndexOutOfRangeError
from .fields import ScalarField, VectorField, sample_scalar_many, sample_vector, sample_vector_many
from .geometry import normalize, orthonormal_frame

_AXIS_NAMES = {"x": 0, "y": 1, "z": 2, 0: 0, 1: 1, 2: 2}


def axis_index(axis) -> int:
    try:
        return _AXIS_NAMES[axis.lower() if isinstance(axis, str) else axis]
    except (KeyError, AttributeError):
        raise ValueError(f"axis must be one of x, y, z (got {axis!r})") from None


class SliceMode(enum.Enum):
    """Local slicer orientation: plane normal from the wand or the field."""

    WAND_PERP = "wand_perp"
    FIELD_PERP = "field_perp"


@dataclass(frozen=True)
class SlicePlane:
    """A finite rectangle in space with an orthonormal right-handed frame."""

    origin: np.ndarray  # rectangle corner (pixel (0,0) side)
    u_axis: np.ndarray
    v_axis: np.ndarray
    normal: np.ndarray
    extent: tuple[float, float]  # (width, height) world units

    def __post_init__(self):
        o = np.asarray(self.origin, dtype=np.float64)
        u = np.asarray(self.u_axis, dtype=np.float64)
        v = np.asarray(self.v_axis, dtype=np.float64)
        n = np.asarray(self.normal, dtype=np.float64)
        for name, vec in (("u_axis", u), ("v_axis", v), ("normal", n)):
            if abs(np.linalg.norm(vec) - 1.0) > 1e-9:
                raise ValueError(f"{name} must be unit length")
        if (
            abs(np.dot(u, v)) > 1e-9
            or abs(np.dot(u, n)) > 1e-9
            or abs(np.dot(v, n)) > 1e-9
            or np.linalg.norm(np.cross(u, v) - n) > 1e-9
        ):
            raise ValueError("(u, v, normal) must be orthonormal and right-handed")
        if not (self.extent[0] > 0 and self.extent[1] > 0):
            raise ValueError("extent must be positive")
        for a in (o, u, v, n):
            a.setflags(write=False)
        object.__setattr__(self, "origin", o)
        object.__setattr__(self, "u_axis", u)
        object.__setattr__(self, "v_axis", v)
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "extent", (float(self.extent[0]), float(self.extent[1])))

    def pixel_centers(self, w: int, h: int) -> np.ndarray:
        """World positions of all pixel centers, shape (h, w, 3)."""
        du = (np.arange(w) + 0.5) / w * self.extent[0]
        dv = (np.arange(h) + 0.5) / h * self.extent[1]
        return (
            self.origin
            + du[None, :, None] * self.u_axis
            + dv[:, None, None] * self.v_axis
        )


@dataclass(frozen=True)
class SliceImage:
    """RGBA pixels, row-major from the plane (u, v) origin."""

    width: int
    height: int
    pixels: np.ndarray  # (height, width, 4) uint8

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.uint8)
        if px.shape != (self.height, self.width, 4):
            raise ValueError(f"pixels shape {px.shape} != (h={self.height}, w={self.width}, 4)")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    def to_bytes(self) -> bytes:
        return self.pixels.tobytes()


@dataclass(frozen=True)
class Colormap:
    """256-entry RGB lookup over a linear scalar range."""

    name: str
    table: np.ndarray  # (256, 3) uint8
    range: tuple[float, float]

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.uint8)
        if t.shape != (256, 3):
            raise ValueError("table must be 256 RGB entries")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "range", (float(self.range[0]), float(self.range[1])))
        if not self.range[0] <= self.range[1]:
            raise ValueError("range must satisfy smin <= smax")

    def indices(self, values: np.ndarray) -> np.ndarray:
        """Map values to table indices; a degenerate range maps to the midpoint."""
        smin, smax = self.range
        if smin == smax:
            return np.full(np.shape(values), 128, dtype=np.int64)
        t = np.clip((np.asarray(values, dtype=np.float64) - smin) / (smax - smin), 0.0, 1.0)
        return np.rint(t * 255).astype(np.int64)

    def rgb(self, values: np.ndarray) -> np.ndarray:
        return self.table[self.indices(values)]

    @staticmethod
    def grayscale(smin: float, smax: float) -> "Colormap":
        ramp = np.repeat(np.arange(256, dtype=np.uint8)[:, None], 3, axis=1)
        return Colormap("gray", ramp, (smin, smax))

    @staticmethod
    def from_matplotlib(name: str, smin: float, smax: float) -> "Colormap":
        import matplotlib

        cm = matplotlib.colormaps[name]
        table = np.rint(cm(np.linspace(0, 1, 256))[:, :3] * 255).astype(np.uint8)
        return Colormap(name, table, (smin, smax))


def default_colormap(name: str, smin: float, smax: float) -> Colormap:
    if name in ("gray", "grey", "grayscale"):
        return Colormap.grayscale(smin, smax)
    return Colormap.from_matplotlib(name, smin, smax)


# ---------------------------------------------------------------------------
# Slicing operations


def orthoslice(scalar: ScalarField, axis, index: int, cmap: Colormap) -> SliceImage:
    """Extract one axis-aligned node plane as a colormapped opaque image.

    Image dims are the two remaining grid dims in axis order; pixel (a, b)
    carries the node value at the sliced index.
    """
    ax = axis_index(axis)
    dims = scalar.grid.dims
    if not 0 <= index < dims[ax]:
        raise IndexOutOfRangeError(f"index {index} out of range for axis {ax} (dim {dims[ax]})")
    vals = np.take(scalar.values, index, axis=ax)  # (d_a, d_b) in remaining-axis order
    rgb = cmap.rgb(vals.T)  # image rows are the second remaining axis
    h, w = rgb.shape[:2]
    px = np.concatenate([rgb, np.full((h, w, 1), 255, dtype=np.uint8)], axis=2)
    return SliceImage(width=w, height=h, pixels=px)


def orient_local_slice(mode, wand_dir, vec: VectorField | None, center,
                       size: tuple[float, float]) -> SlicePlane:
    """Orient the hand-held slice rectangle at a probe center.

    WAND_PERP takes the wand direction as the plane normal; FIELD_PERP takes
    the local field direction (DegenerateNormalError when |v| is ~0).  The
    in-plane frame follows the world-up convention of orthonormal_frame.
    """
    mode = SliceMode(mode)
    center = np.asarray(center, dtype=np.float64)
    if mode is SliceMode.WAND_PERP:
        n = normalize(wand_dir)
    else:
        if vec is None:
            raise ValueError("FIELD_PERP requires a vector field")
        v = sample_vector(vec, center)
        if np.linalg.norm(v) <= 1e-12 * vec.rms_magnitude:
            raise DegenerateNormalError("field magnitude ~0 at slice center")
        n = normalize(v)
    u, vv, n = orthonormal_frame(n)
    w, h = float(size[0]), float(size[1])
    origin = center - 0.5 * w * u - 0.5 * h * vv
    return SlicePlane(origin=origin, u_axis=u, v_axis=vv, normal=n, extent=(w, h))


def axis_plane(grid, axis, index: int) -> SlicePlane:
    """Node-aligned plane coincident with a grid plane.

    Extent spans one spacing per node so that with res = grid dims every
    pixel center lands exactly on a grid node.
    """
    ax = axis_index(axis)
    if not 0 <= index < grid.dims[ax]:
        raise IndexOutOfRangeError(f"index {index} out of range for axis {ax}")
    a_u, a_v = [a for a in range(3) if a != ax]
    basis = np.eye(3)
    u, v = basis[a_u], basis[a_v]
    n = np.cross(u, v)
    spacing = np.array(grid.spacing)
    origin = grid.bounds_min.copy()
    origin[ax] += index * spacing[ax]
    origin -= 0.5 * spacing[a_u] * u + 0.5 * spacing[a_v] * v
    extent = (grid.dims[a_u] * spacing[a_u], grid.dims[a_v] * spacing[a_v])
    return SlicePlane(origin=origin, u_axis=u, v_axis=v, normal=n, extent=extent)


def sample_slice_scalar(scalar: ScalarField, plane: SlicePlane, res: tuple[int, int],
                        cmap: Colormap) -> SliceImage:
    """Colormapped trilinear resampling of a scalar on an arbitrary plane.

    Out-of-domain pixels are fully transparent.
    """
    w, h = int(res[0]), int(res[1])
    if w < 1 or h < 1:
        raise ValueError("resolution must be at least 1x1")
    pts = plane.pixel_centers(w, h).reshape(-1, 3)
    vals, inside = sample_scalar_many(scalar, pts)
    rgb = cmap.rgb(vals)
    px = np.concatenate([rgb, np.full((len(pts), 1), 255, dtype=np.uint8)], axis=1)
    px[~inside] = 0
    return SliceImage(width=w, height=h, pixels=px.reshape(h, w, 4))


def lic_noise(res: tuple[int, int], noise_seed: int) -> np.ndarray:
    """The deterministic white-noise input texture for lic_slice, (h, w) uint8."""
    w, h = int(res[0]), int(res[1])
    rng = np.random.default_rng(noise_seed)
    return rng.integers(0, 256, size=(h, w), dtype=np.uint8)


def lic_slice(vec: VectorField, plane: SlicePlane, res: tuple[int, int],
              kernel_half_len: int = 20, noise_seed: int = 0) -> SliceImage:
    """Line integral convolution of the projected field on a slice plane.

    White noise is smeared along in-plane streamlines: from each pixel the
    projected field is stepped +-kernel_half_len one-pixel steps (first
    order), and the output intensity is the box average of the noise along
    the path.  A path stops at the image edge, the domain boundary, or where
    the projected field magnitude falls to ~0 relative to the field RMS; a
    pixel whose own projection is degenerate keeps its own noise value.
    """
    w, h = int(res[0]), int(res[1])
    if kernel_half_len < 0:
        raise ValueError("kernel_half_len must be >= 0")
    noise = lic_noise((w, h), noise_seed)
    width, height = plane.extent
    px_w, px_h = width / w, height / h
    thresh = 1e-12 * vec.rms_magnitude

    ax, ay = np.meshgrid(np.arange(w) + 0.5, np.arange(h) + 0.5)
    start = np.stack([ax.ravel(), ay.ravel()], axis=1)  # pixel units
    npix = len(start)
    acc = noise.astype(np.float64).ravel().copy()
    cnt = np.ones(npix)

    def world_of(pos):
        return (
            plane.origin
            + (pos[:, 0] * px_w)[:, None] * plane.u_axis
            + (pos[:, 1] * px_h)[:, None] * plane.v_axis
        )

    for sign in (1.0, -1.0):
        pos = start.copy()
        active = np.ones(npix, dtype=bool)
        for _ in range(kernel_half_len):
            vel, inside = sample_vector_many(vec, world_of(pos))
            pu = vel @ plane.u_axis
            pv = vel @ plane.v_axis
            proj = np.hypot(pu, pv)
            active &= inside & (proj > thresh)
            if not active.any():
                break
            # one-pixel arc-length step of the projected direction
            sx = pu / px_w
            sy = pv / px_h
            norm_px = np.hypot(sx, sy)
            norm_px[~active] = 1.0
            pos[active, 0] += sign * (sx / norm_px)[active]
            pos[active, 1] += sign * (sy / norm_px)[active]
            active &= (
                (pos[:, 0] >= 0.0) & (pos[:, 0] < w) & (pos[:, 1] >= 0.0) & (pos[:, 1] < h)
            )
            if not active.any():
                break
            ia = np.floor(pos[active]).astype(np.int64)
            acc[active] += noise[ia[:, 1], ia[:, 0]]
            cnt[active] += 1

    gray = np.rint(acc / cnt).astype(np.uint8).reshape(h, w)
    px = np.empty((h, w, 4), dtype=np.uint8)
    px[..., 0] = px[..., 1] = px[..., 2] = gray
    px[..., 3] = 255
    return SliceImage(width=w, height=h, pixels=px)
