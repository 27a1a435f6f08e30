"""Session state and the command protocol.

Commands mutate or query a :class:`Session`; every command yields exactly one
terminal Ack or Error event, with any Geometry events (``.vfa`` frame bytes)
emitted first, all carrying the triggering command id.  Failed commands leave
the session untouched: handlers validate fully before committing state.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field

from .errors import (
    BadStepError,
    FieldVisError,
    InvalidParamsError,
)
from .fields import FieldSet
from .frames import encode_frame, snapshot_image
from .lod import RoiContext
from .session import (
    Method,
    RecipeItem,
    VisRecipe,
    bake_animation,
    check_roi,
    execute_item,
    execute_recipe,
    load_params,
    save_params,
    validate_item,
)
from .volume import TransferFunction, composite_preview

COMMANDS = (
    "ListFields",
    "SelectStep",
    "AddItem",
    "UpdateItem",
    "RemoveItem",
    "SetRoi",
    "Execute",
    "Bake",
    "SaveParams",
    "LoadParams",
    "Snapshot",
)


@dataclass
class Session:
    """One client's view of a loaded dataset."""

    fieldset: FieldSet
    session_id: str
    current_step: int = 0
    recipe: VisRecipe = field(default_factory=VisRecipe)
    roi: RoiContext | None = None


def open_session(fieldset: FieldSet) -> Session:
    return Session(fieldset=fieldset, session_id=uuid.uuid4().hex[:12])


@dataclass(frozen=True)
class Command:
    id: int
    cmd: str
    args: dict


@dataclass(frozen=True)
class Ack:
    id: int
    result: dict


@dataclass(frozen=True)
class ErrorEvent:
    id: int
    code: str
    message: str


@dataclass(frozen=True)
class Geometry:
    id: int
    payload: bytes


def error_code(exc: Exception) -> str:
    if isinstance(exc, FieldVisError):
        return type(exc).__name__.removesuffix("Error")
    return "InvalidParams"


def _require(args, key):
    if key not in args:
        raise InvalidParamsError(f"missing argument {key!r}")
    return args[key]


def _item_from_args(args) -> RecipeItem:
    return RecipeItem(
        method=_require(args, "method"),
        field_name=_require(args, "field"),
        params=args.get("params") or {},
    )


def handle_command(session: Session, cmd: Command) -> list:
    """Dispatch one command; returns [Geometry...] + exactly one Ack or Error."""
    try:
        handler = _HANDLERS.get(cmd.cmd)
        if handler is None:
            return [ErrorEvent(cmd.id, "UnknownCommand", f"no such command {cmd.cmd!r}")]
        events = handler(session, cmd.args or {})
        return [
            Geometry(cmd.id, ev) if isinstance(ev, bytes) else Ack(cmd.id, ev)
            for ev in events
        ]
    except FieldVisError as e:
        return [ErrorEvent(cmd.id, error_code(e), str(e))]
    except (ValueError, TypeError, KeyError) as e:
        return [ErrorEvent(cmd.id, "InvalidParams", str(e))]


def _list_fields(session, args):
    fs = session.fieldset
    return [
        {
            "scalars": sorted(fs.scalars),
            "vectors": sorted(fs.vectors),
            "steps": fs.steps,
            "dims": list(fs.grid.dims),
            "origin": list(fs.grid.origin),
            "spacing": list(fs.grid.spacing),
            "step": session.current_step,
        }
    ]


def _select_step(session, args):
    step = _require(args, "step")
    if not isinstance(step, int) or not 0 <= step < session.fieldset.steps:
        raise BadStepError(f"step {step!r} outside [0, {session.fieldset.steps})")
    session.current_step = step
    return [{"step": step}]


def _add_item(session, args):
    item = _item_from_args(args)
    validate_item(session.fieldset, item)
    session.recipe = VisRecipe(session.recipe.items + (item,))
    return [{"index": len(session.recipe) - 1}]


def _item_index(session, args) -> int:
    idx = _require(args, "index")
    if not isinstance(idx, int) or not 0 <= idx < len(session.recipe):
        raise InvalidParamsError(f"item index {idx!r} outside [0, {len(session.recipe)})")
    return idx


def _update_item(session, args):
    idx = _item_index(session, args)
    old = session.recipe.items[idx]
    item = RecipeItem(
        method=args.get("method", old.method),
        field_name=args.get("field", old.field_name),
        params=args.get("params", old.params),
    )
    validate_item(session.fieldset, item)
    items = list(session.recipe.items)
    items[idx] = item
    session.recipe = VisRecipe(tuple(items))
    return [{"index": idx}]


def _remove_item(session, args):
    idx = _item_index(session, args)
    items = list(session.recipe.items)
    items.pop(idx)
    session.recipe = VisRecipe(tuple(items))
    return [{"removed": idx}]


def _set_roi(session, args):
    if not args or args.get("min") is None:
        session.roi = None
        return [{"roi": None}]
    roi = RoiContext(
        tuple(_require(args, "min")),
        tuple(_require(args, "max")),
        args.get("outside_level", 1),
    )
    check_roi(session.fieldset, roi)
    session.roi = roi
    return [
        {"roi": {"min": list(roi.roi_min), "max": list(roi.roi_max),
                 "outside_level": roi.outside_level}}
    ]


def _execute(session, args):
    fs = session.fieldset
    step = session.current_step
    if "index" in args and args["index"] is not None:
        idx = _item_index(session, args)
        objects = execute_item(fs, step, session.recipe.items[idx], session.roi)
    else:
        objects = execute_recipe(fs, step, session.recipe, session.roi)
    return [encode_frame(objects), {"objects": len(objects), "step": step}]


def _bake(session, args):
    out_dir = _require(args, "out_dir")
    frames = bake_animation(session.fieldset, session.recipe, out_dir, session.roi)
    return [{"frames": frames, "out_dir": str(out_dir)}]


def _save_params(session, args):
    path = save_params(session.recipe, session.roi, _require(args, "path"))
    return [{"path": str(path)}]


def _load_params(session, args):
    recipe, roi = load_params(_require(args, "path"))
    recipe.validate(session.fieldset)
    if roi is not None:
        check_roi(session.fieldset, roi)
    session.recipe = recipe
    session.roi = roi
    return [{"items": len(recipe), "roi": roi is not None}]


def _snapshot(session, args):
    from .slicing import SliceImage  # local import to keep module load light

    directory = _require(args, "dir")
    idx = _item_index(session, args)
    item = session.recipe.items[idx]
    if item.method is Method.VOLUME:
        scalar = session.fieldset.scalar(item.field_name, session.current_step)
        tf = TransferFunction(tuple((s, tuple(c)) for s, c in item.params["tf"]))
        img = composite_preview(scalar, tf, args.get("axis", "z"))
    else:
        objects = execute_item(session.fieldset, session.current_step, item, session.roi)
        images = [o for o in objects if isinstance(o, SliceImage)]
        if not images:
            raise InvalidParamsError(f"{item.method.value} item produces no image to snapshot")
        img = images[0]
    path = snapshot_image(img, directory, args.get("sequence"))
    return [{"path": str(path)}]


_HANDLERS = {
    "ListFields": _list_fields,
    "SelectStep": _select_step,
    "AddItem": _add_item,
    "UpdateItem": _update_item,
    "RemoveItem": _remove_item,
    "SetRoi": _set_roi,
    "Execute": _execute,
    "Bake": _bake,
    "SaveParams": _save_params,
    "LoadParams": _load_params,
    "Snapshot": _snapshot,
}
