"""Command-line interface.

Subcommands: info, isosurface, trace, lic, bake, serve, report.  Errors exit
nonzero with a one-line diagnostic; each error family has a distinct code
(see EXIT_CODES).
"""

from __future__ import annotations

import argparse
import sys

from . import errors as err
from .fields import load_dataset
from .frames import write_frame, write_ppm
from .report import write_report
from .session import Method, RecipeItem, execute_item, load_params, bake_animation
from .server import default_port, run_server

EXIT_CODES = {
    err.ManifestParseError: 2,
    err.MissingFileError: 3,
    err.TruncatedDataError: 4,
    err.NonFiniteError: 5,
    err.OutOfDomainError: 6,
    err.UnknownMethodError: 7,
    err.UnknownFieldError: 7,
    err.InvalidParamsError: 7,
    err.RecipeInvalidError: 7,
    err.BadStepError: 8,
    err.IoError: 9,
    err.IndexOutOfRangeError: 10,
    err.DegenerateSeedError: 11,
    err.DegenerateNormalError: 11,
    err.BadMagicError: 12,
    err.CorruptFrameError: 12,
    err.ConeOutsideDomainError: 13,
    err.ParamParseError: 14,
}


def exit_code_for(exc: Exception) -> int:
    for klass in type(exc).__mro__:
        if klass in EXIT_CODES:
            return EXIT_CODES[klass]
    return 1


def _parse_triple(text: str) -> list:
    parts = text.split(",")
    if len(parts) != 3:
        raise err.InvalidParamsError(f"expected x,y,z (got {text!r})")
    return [float(p) for p in parts]


def _parse_res(text: str) -> list:
    try:
        w, h = text.lower().split("x")
        return [int(w), int(h)]
    except ValueError:
        raise err.InvalidParamsError(f"expected WxH (got {text!r})") from None


def _cmd_info(args) -> int:
    fs = load_dataset(args.dataset)
    g = fs.grid
    print(f"dims {g.dims[0]} {g.dims[1]} {g.dims[2]}")
    print(f"origin {g.origin[0]:g} {g.origin[1]:g} {g.origin[2]:g}")
    print(f"spacing {g.spacing[0]:g} {g.spacing[1]:g} {g.spacing[2]:g}")
    print(f"steps {fs.steps}")
    print("scalars " + (" ".join(sorted(fs.scalars)) or "-"))
    print("vectors " + (" ".join(sorted(fs.vectors)) or "-"))
    return 0


def _cmd_isosurface(args) -> int:
    fs = load_dataset(args.dataset)
    item = RecipeItem(Method.ISOSURFACE, args.field, {"level": args.level})
    objects = execute_item(fs, args.step, item)
    write_frame(args.out, objects)
    print(f"wrote {args.out} ({objects[0].n_triangles} triangles)")
    return 0


def _cmd_trace(args) -> int:
    fs = load_dataset(args.dataset)
    params = {"seeds": [_parse_triple(s) for s in args.seed]}
    if args.step_factor is not None:
        params["step_factor"] = args.step_factor
    if args.max_steps is not None:
        params["max_steps"] = args.max_steps
    method = Method.FIELD_LINE if args.field_line else Method.TRACER
    objects = execute_item(fs, args.step, RecipeItem(method, args.field, params))
    write_frame(args.out, objects)
    total = sum(len(o) for o in objects)
    print(f"wrote {args.out} ({len(objects)} lines, {total} vertices)")
    return 0


def _cmd_lic(args) -> int:
    fs = load_dataset(args.dataset)
    params = {
        "axis": args.axis,
        "index": args.index,
        "res": _parse_res(args.res),
        "kernel_half_len": args.kernel,
        "noise_seed": args.noise_seed,
    }
    (img,) = execute_item(fs, args.step, RecipeItem(Method.LIC, args.field, params))
    if args.out.endswith(".vfa"):
        write_frame(args.out, [img])
    else:
        write_ppm(args.out, img)
    print(f"wrote {args.out} ({img.width}x{img.height})")
    return 0


def _cmd_bake(args) -> int:
    fs = load_dataset(args.dataset)
    recipe, roi = load_params(args.recipe)
    frames = bake_animation(fs, recipe, args.out_dir, roi)
    print(f"baked {frames} frames into {args.out_dir}")
    return 0


def _cmd_serve(args) -> int:
    fs = load_dataset(args.dataset)
    print(f"serving on ws://{args.host}:{args.port}")
    run_server(fs, args.host, args.port)
    return 0


def _cmd_report(args) -> int:
    fs = load_dataset(args.dataset)
    files = write_report(fs, args.out_dir, step=args.step, cmap_name=args.cmap)
    for f in files:
        print(f"wrote {f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fieldvis",
        description="Headless visualization engine for gridded scalar/vector fields",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="print dataset dims, steps, and field names")
    p.add_argument("dataset")
    p.set_defaults(func=_cmd_info)

    p = sub.add_parser("isosurface", help="extract an isosurface into a .vfa frame")
    p.add_argument("dataset")
    p.add_argument("--field", required=True)
    p.add_argument("--level", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--step", type=int, default=0)
    p.set_defaults(func=_cmd_isosurface)

    p = sub.add_parser("trace", help="trace streamlines or field lines into a .vfa frame")
    p.add_argument("dataset")
    p.add_argument("--field", required=True)
    p.add_argument("--seed", action="append", required=True, metavar="X,Y,Z")
    p.add_argument("--out", required=True)
    p.add_argument("--step", type=int, default=0)
    p.add_argument("--step-factor", type=float, default=None)
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--field-line", action="store_true", help="both directions, unit speed")
    p.set_defaults(func=_cmd_trace)

    p = sub.add_parser("lic", help="line integral convolution on a grid plane")
    p.add_argument("dataset")
    p.add_argument("--field", required=True)
    p.add_argument("--axis", choices=("x", "y", "z"), default="z")
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--res", default="256x256")
    p.add_argument("--kernel", type=int, default=20)
    p.add_argument("--noise-seed", type=int, default=0)
    p.add_argument("--out", required=True, help=".ppm image or .vfa frame")
    p.add_argument("--step", type=int, default=0)
    p.set_defaults(func=_cmd_lic)

    p = sub.add_parser("bake", help="bake a recipe over all time steps")
    p.add_argument("dataset")
    p.add_argument("--recipe", required=True, help="JSON parameter file")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_bake)

    p = sub.add_parser("serve", help="run the websocket session service")
    p.add_argument("dataset")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=default_port())
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("report", help="figures + CSV summary for a dataset")
    p.add_argument("dataset")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--step", type=int, default=0)
    p.add_argument("--cmap", default="viridis")
    p.set_defaults(func=_cmd_report)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except err.FieldVisError as e:
        print(f"fieldvis: error: {e}", file=sys.stderr)
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
