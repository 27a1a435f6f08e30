"""Transfer functions and slice-stack volume rendering assets.

The engine ships :class:`VolumeTexture` assets (normalized voxel bytes plus a
256-entry RGBA lookup) for clients that render stacked textured slices; the
slow, exact :func:`composite_preview` compositor exists so volume behavior is
testable without a GPU.

Per-slice opacity is scaled by ``OPACITY_REF_SLICES / n_slices`` (clamped to
[0, 1]): a stack of 32 slices composites the lookup alphas unchanged, denser
stacks thin each slice out.  The reference count is a documented constant,
not a physically derived correction.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import BadMagicError, CorruptFrameError
from .fields import ScalarField
from .slicing import SliceImage, axis_index

VOLUME_MAGIC = b"VF5T"
OPACITY_REF_SLICES = 32


@dataclass(frozen=True)
class TransferFunction:
    """Sorted piecewise-linear control points mapping scalar -> RGBA."""

    points: tuple  # ((scalar, (r, g, b, a)), ...)

    def __post_init__(self):
        pts = tuple(
            (float(s), tuple(float(c) for c in rgba)) for s, rgba in self.points
        )
        if len(pts) < 2:
            raise ValueError("a transfer function needs at least 2 control points")
        scalars = [s for s, _ in pts]
        if not all(a < b for a, b in zip(scalars, scalars[1:])):
            raise ValueError("control point scalars must be strictly increasing")
        for _, rgba in pts:
            if len(rgba) != 4 or any(not 0.0 <= c <= 1.0 for c in rgba):
                raise ValueError("rgba components must lie in [0, 1]")
        object.__setattr__(self, "points", pts)

    @property
    def scalars(self) -> np.ndarray:
        return np.array([s for s, _ in self.points])

    @property
    def rgba(self) -> np.ndarray:
        return np.array([c for _, c in self.points])


def evaluate_tf(tf: TransferFunction, s) -> np.ndarray:
    """Piecewise-linear RGBA at scalar value(s) s, clamped to the end points."""
    s = np.asarray(s, dtype=np.float64)
    xp = tf.scalars
    fp = tf.rgba
    out = np.stack([np.interp(s, xp, fp[:, c]) for c in range(4)], axis=-1)
    return out


@dataclass(frozen=True)
class VolumeTexture:
    """Normalized voxel bytes plus the quantized transfer-function lookup."""

    dims: tuple[int, int, int]
    voxels: np.ndarray  # (nx, ny, nz) uint8
    lut: np.ndarray  # (256, 4) uint8
    range: tuple[float, float]  # (smin, smax) of the source scalar

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        vox = np.asarray(self.voxels, dtype=np.uint8)
        lut = np.asarray(self.lut, dtype=np.uint8)
        if vox.shape != dims:
            raise ValueError(f"voxels shape {vox.shape} != dims {dims}")
        if lut.shape != (256, 4):
            raise ValueError("lut must be 256 RGBA byte entries")
        vox.setflags(write=False)
        lut.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "voxels", vox)
        object.__setattr__(self, "lut", lut)
        object.__setattr__(self, "range", (float(self.range[0]), float(self.range[1])))

    def to_bytes(self) -> bytes:
        nx, ny, nz = self.dims
        header = VOLUME_MAGIC + struct.pack("<III", nx, ny, nz)
        body = self.voxels.transpose(2, 1, 0).tobytes()  # x-fastest
        return header + body + self.lut.tobytes() + struct.pack("<ff", *self.range)

    @staticmethod
    def from_bytes(data: bytes) -> "VolumeTexture":
        if len(data) < 16 or data[:4] != VOLUME_MAGIC:
            raise BadMagicError("not a VF5T volume texture")
        nx, ny, nz = struct.unpack("<III", data[4:16])
        n = nx * ny * nz
        expected = 16 + n + 1024 + 8
        if len(data) != expected:
            raise CorruptFrameError(f"volume texture length {len(data)} != {expected}")
        vox = np.frombuffer(data, dtype=np.uint8, count=n, offset=16)
        vox = vox.reshape(nz, ny, nx).transpose(2, 1, 0)
        lut = np.frombuffer(data, dtype=np.uint8, count=1024, offset=16 + n).reshape(256, 4)
        smin, smax = struct.unpack("<ff", data[16 + n + 1024 :])
        return VolumeTexture((nx, ny, nz), vox, lut, (smin, smax))


def build_volume_texture(scalar: ScalarField, tf: TransferFunction) -> VolumeTexture:
    """Normalize a scalar field to bytes and bake the transfer-function lookup.

    Voxel byte = round(255 * (v - smin)/(smax - smin)) over the field's own
    min/max; a constant field degenerates to all-zero bytes.
    """
    smin, smax = scalar.min, scalar.max
    if smin == smax:
        vox = np.zeros(scalar.grid.dims, dtype=np.uint8)
    else:
        vox = np.rint(255.0 * (scalar.values - smin) / (smax - smin)).astype(np.uint8)
    lut_scalars = smin + np.arange(256) / 255.0 * (smax - smin)
    lut = np.rint(255.0 * evaluate_tf(tf, lut_scalars)).astype(np.uint8)
    return VolumeTexture(scalar.grid.dims, vox, lut, (smin, smax))


def composite_preview(scalar: ScalarField, tf: TransferFunction, axis,
                      background=(0.0, 0.0, 0.0), order: str = "back_to_front") -> SliceImage:
    """Reference CPU compositor: axis-aligned layers under the over operator.

    The image plane carries the two remaining axes in axis order (same layout
    as an orthoslice); the slice at the highest index along ``axis`` is the
    front.  ``order`` selects back-to-front source-over accumulation or the
    equivalent front-to-back formulation (they agree to 1 byte per channel).
    """
    if order not in ("back_to_front", "front_to_back"):
        raise ValueError("order must be 'back_to_front' or 'front_to_back'")
    ax = axis_index(axis)
    vt = build_volume_texture(scalar, tf)
    rgba = vt.lut[vt.voxels].astype(np.float64) / 255.0  # (nx, ny, nz, 4)
    stack = np.moveaxis(rgba, ax, 0)  # (n_slices, d_a, d_b, 4)
    stack = stack.transpose(0, 2, 1, 3)  # image rows are the second remaining axis
    n = stack.shape[0]
    alpha = np.clip(stack[..., 3] * (OPACITY_REF_SLICES / n), 0.0, 1.0)
    color = stack[..., :3]

    h, w = stack.shape[1], stack.shape[2]
    bg = np.broadcast_to(np.asarray(background, dtype=np.float64), (h, w, 3))
    if order == "back_to_front":
        img = bg.copy()
        for s in range(n):
            a = alpha[s][..., None]
            img = a * color[s] + (1.0 - a) * img
    else:
        img = np.zeros((h, w, 3))
        transparency = np.ones((h, w, 1))
        for s in range(n - 1, -1, -1):
            a = alpha[s][..., None]
            img = img + transparency * a * color[s]
            transparency = transparency * (1.0 - a)
        img = img + transparency * bg

    px = np.empty((h, w, 4), dtype=np.uint8)
    px[..., :3] = np.rint(np.clip(img, 0.0, 1.0) * 255.0)
    px[..., 3] = 255
    return SliceImage(width=w, height=h, pixels=px)
