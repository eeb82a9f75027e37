"""Duplex byte-stream transports carrying trigger frames.

The production channel is a TCP port forwarded by an external tunnel process;
tests use an in-process loopback pair.
"""
import asyncio
from abc import ABC, abstractmethod
from contextlib import suppress
from typing import Optional, Tuple

from stashkit.errors import Timeout, TransportClosed, Truncated
from stashkit.tether.frames import LENGTH, encode_frame, frame_length
from stashkit.tether.plans import parse_endpoint


class Transport(ABC):
    """Ordered, reliable byte stream in both directions."""

    @abstractmethod
    async def read_exactly(self, n: int) -> bytes:
        """Read exactly ``n`` bytes.

        Raises:
            TransportClosed: The peer closed before any byte arrived
            Truncated: The peer closed part-way through
        """

    @abstractmethod
    async def write(self, data: bytes) -> None:
        """Send ``data``; raises TransportClosed once either side has closed."""

    @abstractmethod
    async def close(self) -> None:
        ...


async def read_frame(transport: Transport, max_frame: Optional[int] = None) -> bytes:
    """Read one length-prefixed frame body.

    Raises:
        TransportClosed: Clean close at a frame boundary
        Truncated: Close inside the prefix or body
        FrameTooLarge
    """
    length = frame_length(await transport.read_exactly(LENGTH.size), max_frame)
    try:
        return await transport.read_exactly(length)
    except TransportClosed:
        raise Truncated(f"connection closed before a {length}-byte frame body") from None


async def write_frame(transport: Transport, body: bytes) -> None:
    await transport.write(encode_frame(body))


class _Channel:
    """One direction of a loopback pair."""

    def __init__(self) -> None:
        self.queue: "asyncio.Queue[Optional[bytes]]" = asyncio.Queue()
        self.closed = False


class LoopbackTransport(Transport):
    """In-process transport; create connected ends with :meth:`pair`."""

    def __init__(self, inbox: _Channel, outbox: _Channel):
        self._inbox = inbox
        self._outbox = outbox
        self._buffer = bytearray()
        self._eof = False

    @classmethod
    def pair(cls) -> Tuple["LoopbackTransport", "LoopbackTransport"]:
        a_to_b, b_to_a = _Channel(), _Channel()
        return cls(b_to_a, a_to_b), cls(a_to_b, b_to_a)

    async def read_exactly(self, n: int) -> bytes:
        while len(self._buffer) < n and not self._eof:
            chunk = await self._inbox.queue.get()
            if chunk is None:
                self._eof = True
            else:
                self._buffer += chunk
        if len(self._buffer) < n:
            partial = len(self._buffer)
            self._buffer.clear()
            if partial == 0:
                raise TransportClosed("peer closed the connection")
            raise Truncated(f"peer closed after {partial} of {n} bytes")
        data = bytes(self._buffer[:n])
        del self._buffer[:n]
        return data

    async def write(self, data: bytes) -> None:
        if self._outbox.closed or self._inbox.closed:
            raise TransportClosed("connection is closed")
        if data:
            self._outbox.queue.put_nowait(bytes(data))

    async def close(self) -> None:
        # EOF towards the peer, and wake our own pending reader
        if not self._outbox.closed:
            self._outbox.closed = True
            self._outbox.queue.put_nowait(None)
        if not self._inbox.closed:
            self._inbox.closed = True
            self._inbox.queue.put_nowait(None)


class StreamTransport(Transport):
    """Transport over an asyncio stream pair (TCP)."""

    def __init__(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        self.reader = reader
        self.writer = writer

    @classmethod
    async def connect(cls, endpoint: str, timeout_ms: int = 5000) -> "StreamTransport":
        """Open a TCP connection to ``host:port``.

        Raises:
            BadEndpoint, Timeout, TransportClosed
        """
        host, port = parse_endpoint(endpoint)
        try:
            reader, writer = await asyncio.wait_for(
                asyncio.open_connection(host, port), timeout_ms / 1000.0)
        except asyncio.TimeoutError:
            raise Timeout(f"no connection to {endpoint} within {timeout_ms} ms") from None
        except OSError as e:
            raise TransportClosed(f"cannot connect to {endpoint}: {e}") from e
        return cls(reader, writer)

    async def read_exactly(self, n: int) -> bytes:
        try:
            return await self.reader.readexactly(n)
        except asyncio.IncompleteReadError as e:
            if not e.partial:
                raise TransportClosed("peer closed the connection") from None
            raise Truncated(f"peer closed after {len(e.partial)} of {n} bytes") from None
        except ConnectionError as e:
            raise TransportClosed(str(e)) from e

    async def write(self, data: bytes) -> None:
        if self.writer.is_closing():
            raise TransportClosed("connection is closed")
        try:
            self.writer.write(data)
            await self.writer.drain()
        except ConnectionError as e:
            raise TransportClosed(str(e)) from e

    async def close(self) -> None:
        self.writer.close()
        with suppress(ConnectionError):
            await self.writer.wait_closed()
