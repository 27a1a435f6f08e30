"""Quick-look dataset report: matplotlib figures plus a CSV summary.

For every scalar field the report renders a mid-depth orthoslice and a
volume-compositor preview; every vector field gets a mid-depth LIC image.
``summary.csv`` tabulates per-field per-step statistics.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .errors import IoError
from .fields import FieldSet
from .slicing import axis_plane, default_colormap, lic_slice, orthoslice
from .volume import TransferFunction, composite_preview

_PREVIEW_TF_ALPHA = 0.85


def _summary_rows(fs: FieldSet):
    for name, fields_ in sorted(fs.scalars.items()):
        for t, f in enumerate(fields_):
            v = f.values
            yield [name, "scalar", t, v.min(), v.max(), v.mean(), np.sqrt((v * v).mean())]
    for name, fields_ in sorted(fs.vectors.items()):
        for t, f in enumerate(fields_):
            mag = np.linalg.norm(f.values, axis=-1)
            yield [name, "vector", t, mag.min(), mag.max(), mag.mean(), f.rms_magnitude]


def _save_image_figure(pixels: np.ndarray, title: str, path: Path):
    fig, ax = plt.subplots(figsize=(5, 4.2))
    ax.imshow(pixels, origin="lower", interpolation="nearest")
    ax.set_title(title)
    ax.set_xlabel("u [px]")
    ax.set_ylabel("v [px]")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report(fs: FieldSet, out_dir, step: int = 0, cmap_name: str = "viridis") -> list:
    """Render report files into out_dir; returns the written paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IoError(f"cannot create {out}: {e}") from e
    written = []

    csv_path = out / "summary.csv"
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["field", "kind", "step", "min", "max", "mean", "rms"])
        for row in _summary_rows(fs):
            w.writerow(row)
    written.append(csv_path)

    mid = fs.grid.dims[2] // 2
    for name in sorted(fs.scalars):
        f = fs.scalar(name, step)
        cmap = default_colormap(cmap_name, f.min, f.max)
        img = orthoslice(f, "z", mid, cmap)
        p = out / f"{name}_slice.png"
        _save_image_figure(img.pixels, f"{name} (z-slice {mid}, step {step})", p)
        written.append(p)

        tf = TransferFunction(
            ((f.min, (0.0, 0.0, 0.0, 0.0)), (f.max, (1.0, 1.0, 1.0, _PREVIEW_TF_ALPHA)))
        )
        vol = composite_preview(f, tf, "z", background=(0.05, 0.05, 0.1))
        p = out / f"{name}_volume.png"
        _save_image_figure(vol.pixels, f"{name} (volume preview, step {step})", p)
        written.append(p)

    for name in sorted(fs.vectors):
        vec = fs.vector(name, step)
        plane = axis_plane(fs.grid, "z", mid)
        img = lic_slice(vec, plane, (192, 192), kernel_half_len=15, noise_seed=0)
        p = out / f"{name}_lic.png"
        _save_image_figure(img.pixels, f"{name} (LIC, z-slice {mid}, step {step})", p)
        written.append(p)

    return written
