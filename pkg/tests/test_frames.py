import numpy as np
import pytest

from fieldvis.errors import BadMagicError, CorruptFrameError, IoError
from fieldvis.frames import (
    BakedFrame,
    decode_frame,
    encode_frame,
    frame_filename,
    load_baked_frame,
    snapshot_image,
    write_frame,
    write_ppm,
)
from fieldvis.isosurface import extract_isosurface
from fieldvis.slicing import SliceImage
from fieldvis.tracing import Polyline
from fieldvis.volume import TransferFunction, build_volume_texture

from conftest import scalar_from


@pytest.fixture
def sample_objects(unit_grid):
    f = scalar_from(unit_grid, lambda X, Y, Z: X + Y + Z)
    mesh = extract_isosurface(f, 1.5)
    line = Polyline(np.array([[0, 0, 0], [0.5, 0, 0], [1, 0.25, 0]]), np.array([0.0, 1.0, 2.5]))
    rng = np.random.default_rng(0)
    img = SliceImage(4, 3, rng.integers(0, 256, (3, 4, 4), dtype=np.uint8))
    tf = TransferFunction(((0.0, (0, 0, 0, 0)), (3.0, (1, 1, 1, 1))))
    vol = build_volume_texture(f, tf)
    return [mesh, line, img, vol]


def test_roundtrip_identity(sample_objects):
    blob = encode_frame(sample_objects)
    frame = decode_frame(blob)
    assert len(frame.objects) == 4
    assert encode_frame(frame.objects) == blob


def test_decoded_geometry_matches(sample_objects):
    frame = decode_frame(encode_frame(sample_objects))
    mesh, line, img, vol = frame.objects
    src_mesh, src_line, src_img, src_vol = sample_objects
    assert np.allclose(mesh.positions, src_mesh.positions, atol=1e-6)
    assert np.array_equal(mesh.indices, src_mesh.indices)
    assert np.allclose(line.params, src_line.params)
    assert np.array_equal(img.pixels, src_img.pixels)
    assert np.array_equal(vol.voxels, src_vol.voxels)


def test_bad_magic(sample_objects):
    blob = encode_frame(sample_objects)
    with pytest.raises(BadMagicError):
        decode_frame(b"NOPE" + blob[4:])


def test_truncated_frame(sample_objects):
    blob = encode_frame(sample_objects)
    with pytest.raises(CorruptFrameError):
        decode_frame(blob[:-5])


def test_trailing_garbage(sample_objects):
    blob = encode_frame(sample_objects)
    with pytest.raises(CorruptFrameError):
        decode_frame(blob + b"\x00")


def test_empty_frame():
    blob = encode_frame([])
    frame = decode_frame(blob)
    assert frame.objects == ()
    assert encode_frame(frame.objects) == blob


def test_load_baked_frame_step_from_name(tmp_path, sample_objects):
    path = write_frame(tmp_path / frame_filename(7), sample_objects[:1])
    frame = load_baked_frame(path)
    assert frame.step == 7
    assert isinstance(frame, BakedFrame)


def test_unknown_tag():
    import struct

    blob = b"VF5A" + struct.pack("<II", 0, 1) + struct.pack("<BQ", 99, 0)
    with pytest.raises(CorruptFrameError):
        decode_frame(blob)


# --- snapshots ---


def test_ppm_exact_bytes_1x1_red(tmp_path):
    img = SliceImage(1, 1, np.array([[[255, 0, 0, 255]]], dtype=np.uint8))
    path = snapshot_image(img, tmp_path)
    assert path.name == "snap_0000.ppm"
    assert path.read_bytes() == b"P6\n1 1\n255\n\xff\x00\x00"


def test_snapshot_sequence(tmp_path):
    img = SliceImage(1, 1, np.zeros((1, 1, 4), dtype=np.uint8))
    p0 = snapshot_image(img, tmp_path)
    p1 = snapshot_image(img, tmp_path)
    assert p0.name == "snap_0000.ppm"
    assert p1.name == "snap_0001.ppm"


def test_snapshot_unwritable_dir(tmp_path):
    img = SliceImage(1, 1, np.zeros((1, 1, 4), dtype=np.uint8))
    with pytest.raises(IoError):
        snapshot_image(img, tmp_path / "missing" / "nested")


def test_write_ppm_rgb_array(tmp_path):
    arr = np.arange(24, dtype=np.uint8).reshape(2, 4, 3)
    path = write_ppm(tmp_path / "x.ppm", arr)
    data = path.read_bytes()
    assert data.startswith(b"P6\n4 2\n255\n")
    assert data[len(b"P6\n4 2\n255\n") :] == arr.tobytes()
