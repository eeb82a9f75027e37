"""Packed 16-byte evdev records (32-bit timeval ABI)."""
import struct
from typing import BinaryIO, Iterable, Iterator, List

from stashkit.errors import TruncatedRecord
from stashkit.schemas import InputEvent

# tv_sec u32, tv_usec u32, type u16, code u16, value s32
EVENT_STRUCT = struct.Struct("<IIHHi")
EVENT_SIZE = EVENT_STRUCT.size

assert EVENT_SIZE == 16


def _event(fields: tuple) -> InputEvent:
    sec, usec, etype, code, value = fields
    # struct widths already bound every field
    return InputEvent.model_construct(tv_sec=sec, tv_usec=usec, etype=etype, code=code,
                                      value=value)


def decode_events(stream: bytes) -> List[InputEvent]:
    """Decode a byte stream of packed input events.

    Args:
        stream: Concatenated 16-byte records

    Returns:
        One InputEvent per record

    Raises:
        TruncatedRecord: Length is not a multiple of 16
    """
    if len(stream) % EVENT_SIZE:
        raise TruncatedRecord(
            f"stream of {len(stream)} bytes ends with a partial {len(stream) % EVENT_SIZE}-byte record"
        )
    return [_event(fields) for fields in EVENT_STRUCT.iter_unpack(stream)]


def encode_events(events: Iterable[InputEvent]) -> bytes:
    return b"".join(
        EVENT_STRUCT.pack(e.tv_sec, e.tv_usec, e.etype, e.code, e.value) for e in events
    )


def iter_records(source: BinaryIO, batch: int = 256) -> Iterator[InputEvent]:
    """Yield events from a file or pipe as records arrive.

    Args:
        source: Binary stream (replayed capture file or live device)
        batch: Records requested per read

    Raises:
        TruncatedRecord: The stream ends inside a record
    """
    pending = b""
    while True:
        chunk = source.read(batch * EVENT_SIZE)
        if not chunk:
            break
        pending += chunk
        whole = len(pending) - len(pending) % EVENT_SIZE
        for fields in EVENT_STRUCT.iter_unpack(pending[:whole]):
            yield _event(fields)
        pending = pending[whole:]
    if pending:
        raise TruncatedRecord(f"stream ended inside a record ({len(pending)} trailing bytes)")
