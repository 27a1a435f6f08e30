"""WebSocket session service.

One persistent connection per client; each connection owns an independent
session over the shared (immutable) dataset.  Control messages are JSON text
frames, geometry arrives as binary frames::

    client -> server (text):  {"id": <int>, "cmd": <name>, "args": {...}}
    server -> client (text):  {"id": <int>, "ok": {...}}
                              {"id": <int>, "err": {"code": ..., "message": ...}}
    server -> client (binary): u64 command id (LE) + .vfa frame bytes

Commands are processed one at a time per connection, in arrival order.
The default port comes from the FIELDVIS_PORT environment variable.
"""

from __future__ import annotations

import asyncio
import functools
import json
import os
import struct
import threading

from websockets.asyncio.server import serve as _ws_serve

from .engine import Ack, Command, ErrorEvent, Geometry, handle_command, open_session
from .fields import FieldSet

PORT_ENV_VAR = "FIELDVIS_PORT"
FALLBACK_PORT = 8750


def default_port() -> int:
    try:
        return int(os.environ.get(PORT_ENV_VAR, ""))
    except ValueError:
        return FALLBACK_PORT


def event_messages(events) -> list:
    """Encode engine events as wire messages (str = text frame, bytes = binary)."""
    out = []
    for ev in events:
        if isinstance(ev, Geometry):
            out.append(struct.pack("<Q", int(ev.id)) + ev.payload)
        elif isinstance(ev, Ack):
            out.append(json.dumps({"id": ev.id, "ok": ev.result}))
        elif isinstance(ev, ErrorEvent):
            out.append(json.dumps({"id": ev.id, "err": {"code": ev.code, "message": ev.message}}))
        else:  # pragma: no cover
            raise TypeError(f"unknown event {ev!r}")
    return out


def parse_command(raw: str) -> Command:
    msg = json.loads(raw)
    if not isinstance(msg, dict) or "cmd" not in msg:
        raise ValueError("control frame must be an object with a 'cmd' key")
    cid = msg.get("id")
    if not isinstance(cid, int):
        raise ValueError("control frame needs an integer 'id'")
    args = msg.get("args") or {}
    if not isinstance(args, dict):
        raise ValueError("'args' must be an object")
    return Command(id=cid, cmd=str(msg["cmd"]), args=args)


async def _handle_connection(ws, fieldset: FieldSet):
    session = open_session(fieldset)
    async for raw in ws:
        if isinstance(raw, (bytes, bytearray)):
            await ws.send(json.dumps(
                {"id": None, "err": {"code": "InvalidParams",
                                     "message": "binary frames are server-to-client only"}}
            ))
            continue
        try:
            cmd = parse_command(raw)
        except (ValueError, json.JSONDecodeError) as e:
            await ws.send(json.dumps(
                {"id": None, "err": {"code": "InvalidParams", "message": str(e)}}
            ))
            continue
        # kernels are CPU-bound; keep the event loop responsive for other sessions
        events = await asyncio.to_thread(handle_command, session, cmd)
        for message in event_messages(events):
            await ws.send(message)


async def serve(fieldset: FieldSet, host: str = "127.0.0.1", port: int | None = None,
                ready: "threading.Event | None" = None, port_box: list | None = None):
    """Run the service until cancelled."""
    if port is None:
        port = default_port()
    handler = functools.partial(_handle_connection, fieldset=fieldset)
    async with _ws_serve(handler, host, port) as server:
        if port_box is not None:
            port_box.append(server.sockets[0].getsockname()[1])
        if ready is not None:
            ready.set()
        await asyncio.get_running_loop().create_future()  # run forever


def run_server(fieldset: FieldSet, host: str = "127.0.0.1", port: int | None = None) -> None:
    """Blocking entry point used by the CLI."""
    try:
        asyncio.run(serve(fieldset, host, port))
    except KeyboardInterrupt:
        pass


class BackgroundServer:
    """Service on a daemon thread; used by tests and embedding code."""

    def __init__(self, fieldset: FieldSet, host: str = "127.0.0.1", port: int = 0):
        self._fieldset = fieldset
        self._host = host
        self._requested_port = port
        self._loop = None
        self._thread = None
        self.port = None

    def __enter__(self) -> "BackgroundServer":
        ready = threading.Event()
        port_box: list = []

        def run():
            self._loop = asyncio.new_event_loop()
            asyncio.set_event_loop(self._loop)
            task = self._loop.create_task(
                serve(self._fieldset, self._host, self._requested_port, ready, port_box)
            )
            try:
                self._loop.run_until_complete(task)
            except asyncio.CancelledError:
                pass
            finally:
                self._loop.close()

        self._thread = threading.Thread(target=run, daemon=True)
        self._thread.start()
        if not ready.wait(timeout=10):
            raise RuntimeError("server did not start within 10s")
        self.port = port_box[0]
        return self

    def __exit__(self, *exc):
        if self._loop is not None:
            self._loop.call_soon_threadsafe(
                lambda: [t.cancel() for t in asyncio.all_tasks(self._loop)]
            )
        if self._thread is not None:
            self._thread.join(timeout=10)
        return False

    @property
    def url(self) -> str:
        return f"ws://{self._host}:{self.port}"
