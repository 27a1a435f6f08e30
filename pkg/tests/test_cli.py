import json

import pytest

from fieldvis.cli import main
from fieldvis.fields import load_dataset, save_dataset
from fieldvis.frames import decode_frame, encode_frame
from fieldvis.isosurface import extract_isosurface

from test_session import make_fieldset


@pytest.fixture
def dataset(tmp_path):
    fs = make_fieldset(steps=2)
    save_dataset(fs, tmp_path / "ds")
    return tmp_path / "ds", fs


def test_info(dataset, capsys):
    ds, fs = dataset
    assert main(["info", str(ds)]) == 0
    out = capsys.readouterr().out
    assert "dims 8 8 8" in out
    assert "steps 2" in out
    assert "scalars energy" in out
    assert "vectors flow" in out


def test_info_missing_dataset(tmp_path, capsys):
    rc = main(["info", str(tmp_path / "nope")])
    assert rc == 3
    assert "error" in capsys.readouterr().err


def test_isosurface_roundtrip(dataset, tmp_path, capsys):
    ds, fs = dataset
    out = tmp_path / "mesh.vfa"
    rc = main(["isosurface", str(ds), "--field", "energy", "--level", "0.5",
               "--out", str(out)])
    assert rc == 0
    frame = decode_frame(out.read_bytes())
    assert frame.objects[0].n_triangles > 0


def test_isosurface_unreachable_level_empty_mesh(dataset, tmp_path):
    ds, _ = dataset
    out = tmp_path / "empty.vfa"
    rc = main(["isosurface", str(ds), "--field", "energy", "--level", "999",
               "--out", str(out)])
    assert rc == 0
    frame = decode_frame(out.read_bytes())
    assert frame.objects[0].n_triangles == 0


def test_isosurface_unknown_field(dataset, tmp_path):
    ds, _ = dataset
    rc = main(["isosurface", str(ds), "--field", "ghost", "--level", "1",
               "--out", str(tmp_path / "x.vfa")])
    assert rc == 7


def test_trace(dataset, tmp_path):
    ds, _ = dataset
    out = tmp_path / "lines.vfa"
    rc = main(["trace", str(ds), "--field", "flow", "--seed", "0.5,0,0",
               "--seed", "0.25,0.25,0", "--max-steps", "40", "--out", str(out)])
    assert rc == 0
    frame = decode_frame(out.read_bytes())
    assert len(frame.objects) == 2


def test_trace_seed_outside(dataset, tmp_path):
    ds, _ = dataset
    rc = main(["trace", str(ds), "--field", "flow", "--seed", "9,9,9",
               "--out", str(tmp_path / "x.vfa")])
    assert rc == 6


def test_lic_ppm(dataset, tmp_path):
    ds, _ = dataset
    out = tmp_path / "lic.ppm"
    rc = main(["lic", str(ds), "--field", "flow", "--index", "3", "--res", "32x24",
               "--kernel", "4", "--out", str(out)])
    assert rc == 0
    assert out.read_bytes().startswith(b"P6\n32 24\n255\n")


def test_bake_and_missing_recipe(dataset, tmp_path, capsys):
    ds, _ = dataset
    recipe = {
        "items": [{"method": "Isosurface", "field": "energy", "params": {"level": 0.5}}],
        "roi": None,
    }
    rpath = tmp_path / "recipe.json"
    rpath.write_text(json.dumps(recipe))
    rc = main(["bake", str(ds), "--recipe", str(rpath), "--out-dir", str(tmp_path / "frames")])
    assert rc == 0
    assert (tmp_path / "frames" / "frame_0001.vfa").exists()

    rc = main(["bake", str(ds), "--recipe", str(tmp_path / "missing.json"),
               "--out-dir", str(tmp_path / "f2")])
    assert rc == 14
    assert "missing.json" in capsys.readouterr().err


def test_cli_matches_library_bytes(dataset, tmp_path):
    ds, _ = dataset
    out = tmp_path / "m.vfa"
    main(["isosurface", str(ds), "--field", "energy", "--level", "0.5", "--out", str(out)])
    reloaded = load_dataset(ds)  # the CLI reads float32 from disk; compare like with like
    direct = extract_isosurface(reloaded.scalar("energy", 0), 0.5)
    assert out.read_bytes() == encode_frame([direct])


def test_report(dataset, tmp_path, capsys):
    ds, _ = dataset
    rc = main(["report", str(ds), "--out-dir", str(tmp_path / "rep")])
    assert rc == 0
    rep = tmp_path / "rep"
    assert (rep / "summary.csv").exists()
    assert (rep / "energy_slice.png").exists()
    assert (rep / "energy_volume.png").exists()
    assert (rep / "flow_lic.png").exists()
    header = (rep / "summary.csv").read_text().splitlines()[0]
    assert header == "field,kind,step,min,max,mean,rms"
