"""Live session service: the simulation ticks at wall-clock rate while
human-piloted avatars join, move, and talk over a WebSocket JSON protocol.

One asyncio task owns the world and applies queued avatar commands at tick
boundaries; connection handlers only enqueue commands and relay messages.
The protocol is documented bit-exactly in docs/protocol.md.
"""

from __future__ import annotations

import asyncio
import json
import logging
from dataclasses import dataclass, field
from typing import Any

import websockets

from .scenarios import SCENARIOS
from .sim import World

log = logging.getLogger("parley.server")

PROTOCOL_VERSION = 1


@dataclass
class AvatarSession:
    session_id: int
    avatar_id: str
    socket: Any
    subscribed: bool = True
    last_command_tick: int = 0
    outbox: asyncio.Queue = field(default_factory=asyncio.Queue)


class SessionServer:
    def __init__(
        self,
        world: World,
        speed: float = 1.0,
        snapshot_hz: float = 10.0,
        wait_for_session: bool = False,
    ):
        self.world = world
        self.speed = max(speed, 1e-3)
        self.wait_for_session = wait_for_session
        self.snapshot_every = max(1, int(round(1.0 / (snapshot_hz * world.config.dt))))
        self.sessions: dict[int, AvatarSession] = {}
        self.commands: list[tuple[int, dict]] = []
        self.next_session = 1
        self.stopping = asyncio.Event()

    # -- tick loop -------------------------------------------------------

    async def tick_loop(self) -> None:
        dt = self.world.config.dt
        while not self.stopping.is_set():
            if self.wait_for_session and not self.sessions:
                await asyncio.sleep(0.02)
                continue
            start = asyncio.get_event_loop().time()
            commands, self.commands = self.commands, []
            for session_id, command in commands:
                self._apply_command(session_id, command)
            self.world.tick()
            self._relay_heard()
            if self.world.tick_index % self.snapshot_every == 0:
                snapshot = {"v": PROTOCOL_VERSION, "type": "snapshot", **self.world.snapshot()}
                self._broadcast(snapshot)
            elapsed = asyncio.get_event_loop().time() - start
            await asyncio.sleep(max(0.0, dt / self.speed - elapsed))

    def _apply_command(self, session_id: int, command: dict) -> None:
        session = self.sessions.get(session_id)
        if session is None:
            return
        avatar = self.world.avatars.get(session.avatar_id)
        if avatar is None:
            return
        kind = command.get("type")
        if kind == "move_to":
            path = self.world.grid.path(
                tuple(avatar.pos),
                (float(command["x"]), float(command["y"])),
                snap_goal=False,
            )
            if path is None:
                self._send(session, {"v": PROTOCOL_VERSION, "type": "error", "code": "unreachable", "detail": "no path to that point"})
                return
            avatar.waypoints = path[1:]
        elif kind == "say":
            avatar.say_queue.append(str(command["text"]))
        session.last_command_tick = self.world.tick_index

    def _relay_heard(self) -> None:
        for session in list(self.sessions.values()):
            avatar = self.world.avatars.get(session.avatar_id)
            if avatar is None:
                continue
            events, avatar.inbox = avatar.inbox, []
            for event in events:
                self._send(
                    session,
                    {
                        "v": PROTOCOL_VERSION,
                        "type": "utterance",
                        "speaker": event.speaker,
                        "speaker_name": self.world.registry.assignments.get(
                            event.speaker, event.speaker
                        ),
                        "text": event.text,
                        "tick": event.tick,
                        "addressed_to_you": event.addressee == session.avatar_id,
                    },
                )

    def _broadcast(self, message: dict) -> None:
        for session in list(self.sessions.values()):
            if session.subscribed:
                self._send(session, message)

    def _send(self, session: AvatarSession, message: dict) -> None:
        session.outbox.put_nowait(json.dumps(message))

    # -- connection handling -----------------------------------------------

    async def handler(self, socket) -> None:
        session: AvatarSession | None = None
        sender: asyncio.Task | None = None
        try:
            async for raw in socket:
                try:
                    message = json.loads(raw)
                    if not isinstance(message, dict):
                        raise ValueError("message must be an object")
                except ValueError as exc:
                    await socket.send(
                        json.dumps(
                            {
                                "v": PROTOCOL_VERSION,
                                "type": "error",
                                "code": "malformed",
                                "detail": str(exc),
                            }
                        )
                    )
                    continue
                kind = message.get("type")
                if session is None:
                    if kind != "join":
                        await socket.send(
                            json.dumps(
                                {
                                    "v": PROTOCOL_VERSION,
                                    "type": "error",
                                    "code": "not_joined",
                                    "detail": "send a join message first",
                                }
                            )
                        )
                        continue
                    session = self._join(socket)
                    sender = asyncio.create_task(self._pump(session))
                    continue
                error = self._validate_command(message)
                if error is not None:
                    self._send(session, error)
                    continue
                self.commands.append((session.session_id, message))
        finally:
            if session is not None:
                self.sessions.pop(session.session_id, None)
                self.world.avatars.pop(session.avatar_id, None)
                if sender is not None:
                    sender.cancel()

    def _validate_command(self, message: dict) -> dict | None:
        kind = message.get("type")
        if kind == "say":
            if not str(message.get("text", "")).strip():
                return {
                    "v": PROTOCOL_VERSION,
                    "type": "error",
                    "code": "empty_utterance",
                    "detail": "empty utterance",
                }
            return None
        if kind == "move_to":
            if "x" not in message or "y" not in message:
                return {
                    "v": PROTOCOL_VERSION,
                    "type": "error",
                    "code": "malformed",
                    "detail": "move_to needs x and y",
                }
            return None
        if kind == "join":
            return {
                "v": PROTOCOL_VERSION,
                "type": "error",
                "code": "already_joined",
                "detail": "session already has an avatar",
            }
        return {
            "v": PROTOCOL_VERSION,
            "type": "error",
            "code": "unknown_type",
            "detail": f"unknown message type {kind!r}",
        }

    def _join(self, socket) -> AvatarSession:
        session_id = self.next_session
        self.next_session += 1
        avatar_id = f"avatar_{session_id}"
        avatar = self.world.add_avatar(avatar_id, self._spawn_point())
        session = AvatarSession(session_id, avatar_id, socket)
        self.sessions[session_id] = session
        self._send(
            session,
            {
                "v": PROTOCOL_VERSION,
                "type": "welcome",
                "avatar_id": avatar_id,
                "avatar_name": avatar.name,
                "dt": self.world.config.dt,
                "tick": self.world.tick_index,
                "static_geometry": self.world.static_geometry(),
            },
        )
        return session

    def _spawn_point(self) -> tuple[float, float]:
        b = self.world.domain.world.bounds
        candidate = ((b[0] + b[2]) / 2.0, b[1] + 2.0)
        cell = self.world.grid.nearest_free_cell(candidate)
        if cell is None:
            return candidate
        return self.world.grid.to_world(*cell)

    async def _pump(self, session: AvatarSession) -> None:
        try:
            while True:
                payload = await session.outbox.get()
                await session.socket.send(payload)
        except (asyncio.CancelledError, websockets.ConnectionClosed):
            pass


async def serve(
    world: World,
    port: int,
    speed: float = 1.0,
    ready: asyncio.Event | None = None,
    wait_for_session: bool = False,
):
    server = SessionServer(world, speed=speed, wait_for_session=wait_for_session)
    ticker = asyncio.create_task(server.tick_loop())
    async with websockets.serve(server.handler, "127.0.0.1", port):
        if ready is not None:
            ready.set()
        log.info("serving on ws://127.0.0.1:%d", port)
        try:
            await server.stopping.wait()
        finally:
            ticker.cancel()


def serve_scenario(scenario: str, seed: int = 0, port: int = 8765, speed: float = 1.0) -> None:
    _, world = SCENARIOS[scenario](seed=seed)
    asyncio.run(serve(world, port, speed))
