import copy
import json
import struct

import pytest
from websockets.sync.client import connect

from fieldvis.engine import Ack, Command, ErrorEvent, Geometry, handle_command, open_session
from fieldvis.frames import decode_frame, encode_frame
from fieldvis.isosurface import extract_isosurface
from fieldvis.server import BackgroundServer

from test_session import make_fieldset


def run(session, cmd_name, args=None, cid=1):
    return handle_command(session, Command(cid, cmd_name, args or {}))


def ack_of(events):
    assert isinstance(events[-1], Ack)
    assert all(isinstance(e, Geometry) for e in events[:-1])
    return events[-1]


@pytest.fixture
def session():
    return open_session(make_fieldset(steps=3))


def test_list_fields(session):
    (ack,) = run(session, "ListFields")
    assert ack.result["scalars"] == ["energy"]
    assert ack.result["vectors"] == ["flow"]
    assert ack.result["steps"] == 3


def test_select_step(session):
    ack = ack_of(run(session, "SelectStep", {"step": 2}))
    assert session.current_step == 2 and ack.result["step"] == 2
    (ev,) = run(session, "SelectStep", {"step": 5})
    assert isinstance(ev, ErrorEvent) and ev.code == "BadStep"
    assert session.current_step == 2


def test_add_execute_geometry_matches_direct(session):
    ack_of(run(session, "AddItem", {"method": "Isosurface", "field": "energy",
                                    "params": {"level": 0.5}}))
    events = run(session, "Execute", cid=42)
    geo = events[0]
    assert isinstance(geo, Geometry) and geo.id == 42
    direct = extract_isosurface(session.fieldset.scalar("energy", 0), 0.5)
    assert geo.payload == encode_frame([direct])
    frame = decode_frame(geo.payload)
    assert len(frame.objects) == 1


def test_execute_single_item(session):
    ack_of(run(session, "AddItem", {"method": "Isosurface", "field": "energy",
                                    "params": {"level": 0.5}}))
    ack_of(run(session, "AddItem", {"method": "Orthoslice", "field": "energy",
                                    "params": {"axis": "z", "index": 1}}))
    events = run(session, "Execute", {"index": 1})
    frame = decode_frame(events[0].payload)
    assert len(frame.objects) == 1  # only the orthoslice


def test_failed_add_leaves_state_unchanged(session):
    ack_of(run(session, "AddItem", {"method": "Isosurface", "field": "energy",
                                    "params": {"level": 0.5}}))
    before = copy.deepcopy(
        (session.current_step, session.recipe, session.roi)
    )
    (ev,) = run(session, "AddItem", {"method": "Foo", "field": "energy", "params": {}})
    assert isinstance(ev, ErrorEvent) and ev.code == "UnknownMethod"
    (ev,) = run(session, "AddItem", {"method": "Isosurface", "field": "nope",
                                     "params": {"level": 1.0}})
    assert isinstance(ev, ErrorEvent) and ev.code == "UnknownField"
    (ev,) = run(session, "UpdateItem", {"index": 0, "params": {"level": 1.0, "zzz": 2}})
    assert isinstance(ev, ErrorEvent) and ev.code == "InvalidParams"
    assert (session.current_step, session.recipe, session.roi) == before


def test_update_and_remove(session):
    ack_of(run(session, "AddItem", {"method": "Isosurface", "field": "energy",
                                    "params": {"level": 0.5}}))
    ack_of(run(session, "UpdateItem", {"index": 0, "params": {"level": 0.75}}))
    assert session.recipe.items[0].params["level"] == 0.75
    ack_of(run(session, "RemoveItem", {"index": 0}))
    assert len(session.recipe) == 0


def test_set_roi_and_clear(session):
    ack = ack_of(run(session, "SetRoi", {"min": [-0.5, -0.5, -0.5], "max": [0.5, 0.5, 0.5],
                                         "outside_level": 1}))
    assert session.roi is not None and ack.result["roi"]["outside_level"] == 1
    (ev,) = run(session, "SetRoi", {"min": [5, 5, 5], "max": [6, 6, 6]})
    assert isinstance(ev, ErrorEvent) and session.roi is not None  # unchanged
    ack_of(run(session, "SetRoi", {}))
    assert session.roi is None


def test_save_load_params(session, tmp_path):
    ack_of(run(session, "AddItem", {"method": "Tracer", "field": "flow",
                                    "params": {"seeds": [[0.1, 0.2, 0.3]]}}))
    path = str(tmp_path / "p.json")
    ack_of(run(session, "SaveParams", {"path": path}))
    fresh = open_session(session.fieldset)
    ack = ack_of(run(fresh, "LoadParams", {"path": path}))
    assert ack.result["items"] == 1
    assert fresh.recipe == session.recipe


def test_load_params_invalid_leaves_state(session, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"items": [{"method": "Isosurface", "field": "ghost", '
                   '"params": {"level": 1.0}}]}')
    before = session.recipe
    (ev,) = run(session, "LoadParams", {"path": str(bad)})
    assert isinstance(ev, ErrorEvent) and ev.code == "UnknownField"
    assert session.recipe is before


def test_snapshot_command(session, tmp_path):
    ack_of(run(session, "AddItem", {"method": "Orthoslice", "field": "energy",
                                    "params": {"axis": "z", "index": 1}}))
    ack = ack_of(run(session, "Snapshot", {"dir": str(tmp_path), "index": 0}))
    assert ack.result["path"].endswith("snap_0000.ppm")
    data = (tmp_path / "snap_0000.ppm").read_bytes()
    assert data.startswith(b"P6\n")


def test_bake_command(session, tmp_path):
    ack_of(run(session, "AddItem", {"method": "Isosurface", "field": "energy",
                                    "params": {"level": 0.5}}))
    ack = ack_of(run(session, "Bake", {"out_dir": str(tmp_path / "frames")}))
    assert ack.result["frames"] == 3
    assert (tmp_path / "frames" / "frame_0002.vfa").exists()


def test_unknown_command(session):
    (ev,) = run(session, "Teleport")
    assert isinstance(ev, ErrorEvent) and ev.code == "UnknownCommand"


def test_execute_determinism(session):
    ack_of(run(session, "AddItem", {"method": "LIC", "field": "flow",
                                    "params": {"axis": "z", "index": 3, "res": [32, 32],
                                               "kernel_half_len": 4}}))
    a = run(session, "Execute")[0].payload
    b = run(session, "Execute")[0].payload
    assert a == b


# --- websocket service ---


class Client:
    def __init__(self, url):
        self.ws = connect(url)
        self.next_id = 0

    def close(self):
        self.ws.close()

    def send(self, cmd, args=None):
        self.next_id += 1
        self.ws.send(json.dumps({"id": self.next_id, "cmd": cmd, "args": args or {}}))
        return self.next_id

    def recv_reply(self):
        """Collect (binary geometry frames, terminal json reply)."""
        blobs = []
        while True:
            msg = self.ws.recv(timeout=30)
            if isinstance(msg, (bytes, bytearray)):
                blobs.append(bytes(msg))
                continue
            return blobs, json.loads(msg)

    def call(self, cmd, args=None):
        cid = self.send(cmd, args)
        blobs, reply = self.recv_reply()
        assert reply["id"] == cid
        return blobs, reply


@pytest.fixture(scope="module")
def server():
    fs = make_fieldset(steps=2)
    with BackgroundServer(fs) as srv:
        yield srv


def test_ws_list_fields(server):
    c = Client(server.url)
    try:
        blobs, reply = c.call("ListFields")
        assert blobs == []
        assert reply["ok"]["scalars"] == ["energy"]
    finally:
        c.close()


def test_ws_geometry_binary_frame(server):
    c = Client(server.url)
    try:
        c.call("AddItem", {"method": "Isosurface", "field": "energy",
                           "params": {"level": 0.5}})
        blobs, reply = c.call("Execute")
        assert "ok" in reply
        assert len(blobs) == 1
        (cid,) = struct.unpack("<Q", blobs[0][:8])
        assert cid == reply["id"]
        direct = extract_isosurface(make_fieldset(steps=2).scalar("energy", 0), 0.5)
        assert blobs[0][8:] == encode_frame([direct])
    finally:
        c.close()


def test_ws_error_reply(server):
    c = Client(server.url)
    try:
        blobs, reply = c.call("SelectStep", {"step": 99})
        assert reply["err"]["code"] == "BadStep"
    finally:
        c.close()


def test_ws_sessions_independent(server):
    a, b = Client(server.url), Client(server.url)
    try:
        a.call("AddItem", {"method": "Isosurface", "field": "energy", "params": {"level": 0.5}})
        _, reply = b.call("Execute")
        assert reply["ok"]["objects"] == 0  # b's recipe is empty
    finally:
        a.close()
        b.close()


def test_ws_malformed_json(server):
    c = Client(server.url)
    try:
        c.ws.send("{not json")
        msg = json.loads(c.ws.recv(timeout=30))
        assert msg["err"]["code"] == "InvalidParams"
    finally:
        c.close()
