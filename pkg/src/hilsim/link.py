"""Byte-stream transport for the HIL boundary.

Default transport is TCP on localhost; the link descriptor string
("tcp:HOST:PORT") is the only thing the autopilot process is ever told.
Anything that moves ordered bytes works: the framing layer in
hilsim.protocol owns integrity and resync.
"""

from __future__ import annotations

import socket
from dataclasses import dataclass

from .protocol import Message, StreamDecoder, encode_frame


class LinkClosed(ConnectionError):
    """Peer went away (EOF or reset)."""


class LinkTimeout(TimeoutError):
    """No frame from the peer within the allowed window."""


def parse_descriptor(descriptor: str) -> tuple[str, int]:
    """Parse "tcp:HOST:PORT" into (host, port)."""
    kind, _, rest = descriptor.partition(":")
    if kind != "tcp" or ":" not in rest:
        raise ValueError(f"unsupported link descriptor {descriptor!r}")
    host, _, port = rest.rpartition(":")
    return host, int(port)


def connect(descriptor: str, timeout: float = 5.0) -> "FrameLink":
    host, port = parse_descriptor(descriptor)
    sock = socket.create_connection((host, port), timeout=timeout)
    return FrameLink(sock)


class Listener:
    """Harness-side acceptor; bind first, then hand the descriptor to the
    spawned autopilot."""

    def __init__(self, host: str = "127.0.0.1"):
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind((host, 0))
        self._sock.listen(1)
        self.host = host
        self.port = self._sock.getsockname()[1]

    @property
    def descriptor(self) -> str:
        return f"tcp:{self.host}:{self.port}"

    def accept(self, timeout: float = 5.0) -> "FrameLink":
        self._sock.settimeout(timeout)
        conn, _ = self._sock.accept()
        return FrameLink(conn)

    def close(self) -> None:
        self._sock.close()


@dataclass
class LinkStats:
    frames_sent: int = 0
    bytes_sent: int = 0
    frames_received: int = 0
    frames_corrupted: int = 0


class FrameLink:
    """Framed messages over one socket, with optional byte-noise injection
    for fault campaigns (applied to outgoing bytes and to incoming bytes
    before parsing, as if the cable were noisy)."""

    def __init__(self, sock: socket.socket):
        sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        self._sock = sock
        self._decoder = StreamDecoder()
        self.stats = LinkStats()
        self.noise_rate = 0.0
        self.noise_rng = None

    def _mangle(self, data: bytes) -> bytes:
        if self.noise_rate <= 0.0 or self.noise_rng is None or not data:
            return data
        n_err = self.noise_rng.binomial(len(data), self.noise_rate)
        if n_err == 0:
            return data
        buf = bytearray(data)
        for _ in range(n_err):
            i = int(self.noise_rng.integers(0, len(buf)))
            buf[i] ^= int(self.noise_rng.integers(1, 256))
        return bytes(buf)

    def send(self, message: Message) -> None:
        frame = self._mangle(encode_frame(message))
        try:
            self._sock.sendall(frame)
        except (BrokenPipeError, ConnectionResetError, OSError) as e:
            raise LinkClosed(str(e)) from e
        self.stats.frames_sent += 1
        self.stats.bytes_sent += len(frame)

    def poll(self, timeout: float = 0.0) -> list[Message]:
        """Read whatever is available within timeout; may return []."""
        self._sock.settimeout(timeout if timeout > 0 else 0.000001)
        try:
            data = self._sock.recv(65536)
        except socket.timeout:
            return []
        except OSError as e:
            raise LinkClosed(str(e)) from e
        if data == b"":
            raise LinkClosed("peer closed the link")
        messages = self._decoder.feed(self._mangle(data))
        self.stats.frames_received += len(messages)
        self.stats.frames_corrupted = self._decoder.errors
        return messages

    def read_until(self, predicate, timeout: float) -> list[Message]:
        """Block until a message satisfying predicate arrives; returns every
        message received, in order (the match is the last element)."""
        collected: list[Message] = []
        self._sock.settimeout(timeout)
        while True:
            try:
                data = self._sock.recv(65536)
            except socket.timeout:
                raise LinkTimeout(f"no matching frame within {timeout} s") from None
            except OSError as e:
                raise LinkClosed(str(e)) from e
            if data == b"":
                raise LinkClosed("peer closed the link")
            messages = self._decoder.feed(self._mangle(data))
            self.stats.frames_received += len(messages)
            self.stats.frames_corrupted = self._decoder.errors
            collected.extend(messages)
            if any(predicate(m) for m in messages):
                return collected

    def close(self) -> None:
        try:
            self._sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self._sock.close()
