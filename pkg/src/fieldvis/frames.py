"""Binary frame format (.vfa) for baked geometry, plus PPM snapshots.

Layout (little-endian throughout)::

    "VF5A"  u32 sequence  u32 object_count  object*
    object: u8 tag  u64 payload_length  payload

Tags: 1 mesh (u32 nverts, u32 nindices, f32 positions, f32 normals,
u32 indices), 2 polyline (u32 count, f32 xyz, f32 params), 3 image
(u32 w, u32 h, RGBA bytes), 4 volume texture (a complete VF5T blob).

The header sequence word is written as 0 by every producer so that frames
are a pure function of their geometry (identical inputs give identical
bytes); a baked frame's time step is carried by its ``frame_%04d.vfa``
file name instead.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadMagicError, CorruptFrameError, IoError
from .isosurface import TriangleMesh
from .slicing import SliceImage
from .tracing import Polyline
from .volume import VolumeTexture

FRAME_MAGIC = b"VF5A"
TAG_MESH = 1
TAG_POLYLINE = 2
TAG_IMAGE = 3
TAG_VOLUME = 4

_FRAME_NAME_RE = re.compile(r"frame_(\d{4})\.vfa$")


def frame_filename(step: int) -> str:
    return f"frame_{step:04d}.vfa"


@dataclass(frozen=True)
class BakedFrame:
    """Decoded contents of one .vfa file."""

    step: int
    objects: tuple

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))


def encode_object(obj) -> bytes:
    if isinstance(obj, TriangleMesh):
        tag = TAG_MESH
        payload = (
            struct.pack("<II", obj.n_vertices, 3 * obj.n_triangles)
            + obj.positions.astype("<f4").tobytes()
            + obj.normals.astype("<f4").tobytes()
            + obj.indices.astype("<u4").tobytes()
        )
    elif isinstance(obj, Polyline):
        tag = TAG_POLYLINE
        payload = (
            struct.pack("<I", len(obj))
            + obj.vertices.astype("<f4").tobytes()
            + obj.params.astype("<f4").tobytes()
        )
    elif isinstance(obj, SliceImage):
        tag = TAG_IMAGE
        payload = struct.pack("<II", obj.width, obj.height) + obj.to_bytes()
    elif isinstance(obj, VolumeTexture):
        tag = TAG_VOLUME
        payload = obj.to_bytes()
    else:
        raise TypeError(f"cannot serialize object of type {type(obj).__name__}")
    return struct.pack("<BQ", tag, len(payload)) + payload


def encode_frame(objects, sequence: int = 0) -> bytes:
    parts = [FRAME_MAGIC, struct.pack("<II", sequence, len(objects))]
    parts.extend(encode_object(o) for o in objects)
    return b"".join(parts)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise CorruptFrameError(
                f"truncated frame: wanted {n} bytes at offset {self.pos}, "
                f"have {len(self.data) - self.pos}"
            )
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def array(self, dtype, count):
        itemsize = np.dtype(dtype).itemsize
        return np.frombuffer(self.take(itemsize * count), dtype=dtype)


def _decode_object(tag: int, payload: bytes):
    r = _Reader(payload)
    try:
        if tag == TAG_MESH:
            nv = r.u32()
            ni = r.u32()
            pos = r.array("<f4", 3 * nv).reshape(nv, 3)
            nrm = r.array("<f4", 3 * nv).reshape(nv, 3)
            idx = r.array("<u4", ni).reshape(-1, 3)
            obj = TriangleMesh(pos, nrm, idx.astype(np.int64))
        elif tag == TAG_POLYLINE:
            n = r.u32()
            verts = r.array("<f4", 3 * n).reshape(n, 3)
            params = r.array("<f4", n)
            obj = Polyline(verts, params)
        elif tag == TAG_IMAGE:
            w = r.u32()
            h = r.u32()
            px = r.array("u1", 4 * w * h).reshape(h, w, 4)
            obj = SliceImage(width=w, height=h, pixels=px)
        elif tag == TAG_VOLUME:
            obj = VolumeTexture.from_bytes(payload)
            r.pos = len(payload)
        else:
            raise CorruptFrameError(f"unknown object tag {tag}")
    except (ValueError, BadMagicError) as e:
        raise CorruptFrameError(f"object payload does not decode: {e}") from e
    if r.pos != len(payload):
        raise CorruptFrameError(f"object payload has {len(payload) - r.pos} trailing bytes")
    return obj


def decode_frame(data: bytes, step: int = 0) -> BakedFrame:
    """Decode frame bytes; raises BadMagicError / CorruptFrameError."""
    if len(data) < 4 or data[:4] != FRAME_MAGIC:
        raise BadMagicError("not a VF5A frame")
    r = _Reader(data)
    r.pos = 4
    r.u32()  # sequence word, always 0 from this engine
    count = r.u32()
    objects = []
    for _ in range(count):
        tag = struct.unpack("<B", r.take(1))[0]
        (plen,) = struct.unpack("<Q", r.take(8))
        objects.append(_decode_object(tag, r.take(plen)))
    if r.pos != len(data):
        raise CorruptFrameError(f"{len(data) - r.pos} trailing bytes after last object")
    return BakedFrame(step=step, objects=tuple(objects))


def load_baked_frame(path) -> BakedFrame:
    """Load one frame file; the step is recovered from its file name."""
    path = Path(path)
    m = _FRAME_NAME_RE.search(path.name)
    step = int(m.group(1)) if m else 0
    try:
        data = path.read_bytes()
    except OSError as e:
        raise IoError(f"cannot read frame: {e}") from e
    return decode_frame(data, step=step)


def write_frame(path, objects) -> Path:
    path = Path(path)
    try:
        path.write_bytes(encode_frame(objects))
    except OSError as e:
        raise IoError(f"cannot write frame: {e}") from e
    return path


# ---------------------------------------------------------------------------
# PPM snapshots


def _as_rgb(img) -> np.ndarray:
    if isinstance(img, SliceImage):
        return np.ascontiguousarray(img.pixels[..., :3])
    arr = np.asarray(img)
    if arr.ndim == 3 and arr.shape[2] in (3, 4) and arr.dtype == np.uint8:
        return np.ascontiguousarray(arr[..., :3])
    raise TypeError("snapshot needs a SliceImage or an (h, w, 3|4) uint8 array")


def write_ppm(path, img) -> Path:
    """Binary PPM (P6), bit-exact: header 'P6\\n{w} {h}\\n255\\n' + RGB bytes."""
    rgb = _as_rgb(img)
    h, w = rgb.shape[:2]
    path = Path(path)
    try:
        with open(path, "wb") as f:
            f.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
            f.write(rgb.tobytes())
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from e
    return path


def snapshot_image(img, directory, sequence: int | None = None) -> Path:
    """Write a snapshot as ``snap_%04d.ppm``, auto-numbering when sequence is None."""
    directory = Path(directory)
    if sequence is None:
        taken = set()
        try:
            for p in directory.iterdir():
                m = re.fullmatch(r"snap_(\d{4})\.ppm", p.name)
                if m:
                    taken.add(int(m.group(1)))
        except OSError as e:
            raise IoError(f"cannot list {directory}: {e}") from e
        sequence = 0
        while sequence in taken:
            sequence += 1
    return write_ppm(directory / f"snap_{sequence:04d}.ppm", img)
