"""Length-prefixed frames and the photo-trigger message bodies.

Frame: u32 little-endian body length, then the body.
Request body: version, op, camera, reserved (u8 each).
Response body: version u8, status u8, payload length u32 LE, payload.
"""
import struct
from typing import Optional, Tuple

from stashkit.errors import FrameTooLarge, MalformedRequest, RemoteError, Truncated
from stashkit.schemas import TriggerRequest, TriggerResponse

PROTOCOL_VERSION = 1
STATUS_OK = 0
STATUS_ERROR = 1
DEFAULT_MAX_FRAME = 64 << 20

LENGTH = struct.Struct("<I")
REQUEST = struct.Struct("<BBBB")
RESPONSE_HEAD = struct.Struct("<BBI")


def encode_frame(body: bytes) -> bytes:
    if len(body) > 0xFFFFFFFF:
        raise FrameTooLarge(f"body of {len(body)} bytes does not fit a u32 length")
    return LENGTH.pack(len(body)) + bytes(body)


def frame_length(prefix: bytes, max_frame: Optional[int] = None) -> int:
    """Body length announced by a 4-byte prefix.

    Raises:
        FrameTooLarge: Length exceeds ``max_frame``
    """
    (length,) = LENGTH.unpack(prefix)
    if max_frame is not None and length > max_frame:
        raise FrameTooLarge(f"frame announces {length} bytes (limit {max_frame})",
                            length=length)
    return length


def decode_frame(stream: bytes, max_frame: Optional[int] = None) -> Tuple[bytes, bytes]:
    """Split the first frame off ``stream``.

    Args:
        stream: Buffered bytes starting at a frame boundary
        max_frame: Largest body accepted (unbounded when None)

    Returns:
        (body, unconsumed remainder)

    Raises:
        Truncated: Fewer than 4 + length bytes available
        FrameTooLarge
    """
    if len(stream) < LENGTH.size:
        raise Truncated(f"need {LENGTH.size} length bytes, have {len(stream)}")
    length = frame_length(bytes(stream[:LENGTH.size]), max_frame)
    end = LENGTH.size + length
    if len(stream) < end:
        raise Truncated(f"frame body of {length} bytes, only {len(stream) - LENGTH.size} available")
    return bytes(stream[LENGTH.size:end]), bytes(stream[end:])


def encode_request(request: TriggerRequest) -> bytes:
    return REQUEST.pack(request.version, request.op, request.camera, request.reserved)


def decode_request(body: bytes) -> TriggerRequest:
    """Parse a request body; unknown ops are left to the dispatcher.

    Raises:
        MalformedRequest: Wrong size, version or reserved byte
    """
    if len(body) != REQUEST.size:
        raise MalformedRequest(f"request body is {len(body)} bytes, expected {REQUEST.size}")
    version, op, camera, reserved = REQUEST.unpack(body)
    if version != PROTOCOL_VERSION:
        raise MalformedRequest(f"unsupported protocol version {version}", version=version)
    if reserved != 0:
        raise MalformedRequest(f"reserved byte is {reserved:#04x}, expected 0")
    return TriggerRequest(version=version, op=op, camera=camera, reserved=reserved)


def encode_response(response: TriggerResponse) -> bytes:
    head = RESPONSE_HEAD.pack(response.version, response.status, len(response.payload))
    return head + response.payload


def decode_response(body: bytes) -> TriggerResponse:
    """Parse a response body.

    Raises:
        Truncated: Payload shorter than announced
        RemoteError: Unsupported version or trailing bytes
    """
    if len(body) < RESPONSE_HEAD.size:
        raise Truncated(f"response body is {len(body)} bytes, header needs {RESPONSE_HEAD.size}")
    version, status, payload_len = RESPONSE_HEAD.unpack_from(body)
    if version != PROTOCOL_VERSION:
        raise RemoteError(f"unsupported response version {version}", version=version)
    payload = body[RESPONSE_HEAD.size:]
    if len(payload) < payload_len:
        raise Truncated(f"response payload of {payload_len} bytes, only {len(payload)} present")
    if len(payload) > payload_len:
        raise RemoteError(f"{len(payload) - payload_len} stray bytes after response payload")
    return TriggerResponse(version=version, status=status, payload=bytes(payload))
