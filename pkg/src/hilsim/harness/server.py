"""WebSocket telemetry/command service for the ground-control UI.

One JSON telemetry object per published tick (the runner decimates to
<= 20 Hz); inbound JSON commands are queued for the simulation thread,
which applies them and produces the acknowledgement echo. Malformed input
gets an error object back and never interrupts the stream. Schema is
documented in docs/websocket.md and carries a version field.
"""

from __future__ import annotations

import asyncio
import json
import queue
import threading

import websockets
import websockets.exceptions

SCHEMA_VERSION = 1
MAX_BACKLOG = 64   # dropped-oldest bound so an idle client can't grow memory


class PortUnavailable(OSError):
    """Requested TCP port could not be bound."""


def serve_telemetry(port: int, host: str = "127.0.0.1") -> "TelemetryServer":
    """Start the telemetry/command service and return its handle.

    Pass the handle to run_scenario(..., server=handle); call .stop() when
    finished. Raises PortUnavailable if the port cannot be bound.
    """
    return TelemetryServer(port, host=host).start()


class TelemetryServer:
    """Bridge between the synchronous sim loop and async WebSocket clients.

    The sim thread calls publish_telemetry() and drain_commands(); all
    socket work happens on a private asyncio loop thread.
    """

    def __init__(self, port: int, host: str = "127.0.0.1"):
        self.host = host
        self.port = port
        self._commands: queue.Queue = queue.Queue()
        self._clients: set = set()
        self._loop: asyncio.AbstractEventLoop | None = None
        self._thread: threading.Thread | None = None
        self._started = threading.Event()
        self._startup_error: BaseException | None = None
        self._server = None

    # -- sim-thread API -------------------------------------------------------

    def start(self) -> "TelemetryServer":
        self._thread = threading.Thread(target=self._run_loop, daemon=True,
                                        name="telemetry-server")
        self._thread.start()
        self._started.wait(timeout=10.0)
        if self._startup_error is not None:
            raise PortUnavailable(
                f"cannot serve on {self.host}:{self.port}: {self._startup_error}")
        return self

    def stop(self) -> None:
        if self._loop is not None:
            self._loop.call_soon_threadsafe(self._loop.stop)
        if self._thread is not None:
            self._thread.join(timeout=5.0)

    def publish_telemetry(self, obj: dict) -> None:
        if self._loop is None:
            return
        obj.setdefault("v", SCHEMA_VERSION)
        self._loop.call_soon_threadsafe(self._broadcast, json.dumps(obj))

    def drain_commands(self) -> list:
        """Commands received since the last call, each as (dict, reply_fn).

        reply_fn takes the acknowledgement/error object to send back to the
        issuing client.
        """
        out = []
        while True:
            try:
                out.append(self._commands.get_nowait())
            except queue.Empty:
                return out

    # -- loop-thread internals --------------------------------------------------

    def _run_loop(self) -> None:
        loop = asyncio.new_event_loop()
        asyncio.set_event_loop(loop)
        self._loop = loop

        async def boot():
            try:
                self._server = await websockets.serve(
                    self._handler, self.host, self.port, max_queue=8)
            except OSError as e:
                self._startup_error = e
            finally:
                self._started.set()

        loop.run_until_complete(boot())
        if self._startup_error is None:
            loop.run_forever()
        loop.close()

    def _broadcast(self, text: str) -> None:
        for ws in list(self._clients):
            self._try_send(ws, text)

    def _try_send(self, ws, text: str) -> None:
        async def send():
            try:
                await ws.send(text)
            except websockets.exceptions.ConnectionClosed:
                self._clients.discard(ws)
        asyncio.ensure_future(send())

    async def _handler(self, ws) -> None:
        self._clients.add(ws)
        try:
            async for raw in ws:
                await self._handle_command(ws, raw)
        except websockets.exceptions.ConnectionClosed:
            pass
        finally:
            self._clients.discard(ws)

    async def _handle_command(self, ws, raw) -> None:
        try:
            cmd = json.loads(raw)
            if not isinstance(cmd, dict) or "type" not in cmd:
                raise ValueError("command must be an object with a 'type' field")
        except (ValueError, TypeError) as e:
            await ws.send(json.dumps({"type": "error", "command": None,
                                      "reason": f"malformed command: {e}"}))
            return

        loop = asyncio.get_running_loop()
        done: asyncio.Future = loop.create_future()

        def reply(obj: dict) -> None:
            obj.setdefault("v", SCHEMA_VERSION)
            loop.call_soon_threadsafe(
                lambda: done.done() or done.set_result(obj))

        if self._commands.qsize() >= MAX_BACKLOG:
            await ws.send(json.dumps({"type": "error",
                                      "command": cmd.get("type"),
                                      "reason": "command backlog full"}))
            return
        self._commands.put((cmd, reply))
        try:
            result = await asyncio.wait_for(done, timeout=10.0)
        except asyncio.TimeoutError:
            result = {"type": "error", "command": cmd.get("type"),
                      "reason": "no simulation loop is consuming commands"}
        try:
            await ws.send(json.dumps(result))
        except websockets.exceptions.ConnectionClosed:
            pass
