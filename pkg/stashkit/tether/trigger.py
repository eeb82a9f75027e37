"""Remote photo trigger: request/response over a framed transport."""
import asyncio
from typing import Callable, Optional

from loguru import logger

from stashkit.errors import (
    FrameTooLarge,
    MalformedRequest,
    RemoteError,
    Timeout,
    TransportClosed,
    Truncated,
)
from stashkit.gesture.camera import capture_photo
from stashkit.observability.metrics import incr, timed
from stashkit.schemas import Camera, TriggerOp, TriggerRequest, TriggerResponse
from stashkit.tether.frames import (
    DEFAULT_MAX_FRAME,
    STATUS_ERROR,
    STATUS_OK,
    decode_request,
    decode_response,
    encode_request,
    encode_response,
)
from stashkit.tether.plans import parse_endpoint
from stashkit.tether.transport import StreamTransport, Transport, read_frame, write_frame

PhotoFn = Callable[[Camera], bytes]

_ERROR = TriggerResponse(status=STATUS_ERROR)


def handle_request(body: bytes, photo_fn: PhotoFn) -> TriggerResponse:
    """Build the response for one request body; never raises on bad input."""
    try:
        request = decode_request(body)
    except MalformedRequest as e:
        logger.warning("malformed request: {}", e)
        return _ERROR

    if request.op == TriggerOp.PING:
        return TriggerResponse(status=STATUS_OK)
    if request.op == TriggerOp.PHOTO:
        if request.camera not in tuple(Camera):
            logger.warning("photo requested from unknown camera {}", request.camera)
            return _ERROR
        return TriggerResponse(status=STATUS_OK, payload=photo_fn(Camera(request.camera)))
    logger.warning("unknown op {}", request.op)
    return _ERROR


@timed("serve")
async def serve_trigger(transport: Transport, photo_fn: PhotoFn = capture_photo, *,
                        max_frame: int = DEFAULT_MAX_FRAME,
                        max_requests: Optional[int] = None) -> int:
    """Answer requests on one connection until it closes.

    Args:
        transport: Connected transport
        photo_fn: Capture function for PHOTO requests
        max_frame: Largest request body accepted
        max_requests: Stop after this many responses (unbounded when None)

    Returns:
        Number of requests answered
    """
    served = 0
    while max_requests is None or served < max_requests:
        try:
            body = await read_frame(transport, max_frame)
        except (TransportClosed, Truncated) as e:
            logger.debug("trigger connection ended: {}", e)
            break
        except FrameTooLarge as e:
            # The stream cannot be resynchronised past a bogus length
            logger.warning("dropping connection: {}", e)
            try:
                await write_frame(transport, encode_response(_ERROR))
            except TransportClosed:
                pass
            served += 1
            break

        response = handle_request(body, photo_fn)
        try:
            await write_frame(transport, encode_response(response))
        except TransportClosed:
            break
        served += 1
        incr("requests_served")
        logger.debug("answered request {} (status {}, {} bytes)", served, response.status,
                     len(response.payload))
    await transport.close()
    logger.info("trigger server stopped after {} requests", served)
    return served


async def request(transport: Transport, req: TriggerRequest, timeout_ms: int = 5000,
                  max_frame: int = DEFAULT_MAX_FRAME) -> TriggerResponse:
    """Send one request and wait for its response.

    Raises:
        Timeout: No complete response within ``timeout_ms``
        TransportClosed, Truncated
    """
    await write_frame(transport, encode_request(req))
    try:
        body = await asyncio.wait_for(read_frame(transport, max_frame), timeout_ms / 1000.0)
    except asyncio.TimeoutError:
        raise Timeout(f"no response within {timeout_ms} ms", timeout_ms=timeout_ms) from None
    return decode_response(body)


async def ping(transport: Transport, timeout_ms: int = 5000) -> None:
    """Round-trip a PING.

    Raises:
        RemoteError: Non-zero status
    """
    response = await request(transport, TriggerRequest(op=TriggerOp.PING), timeout_ms)
    if response.status != STATUS_OK:
        raise RemoteError(f"ping answered with status {response.status}")


async def request_photo(transport: Transport, camera: Camera = Camera.BACK,
                        timeout_ms: int = 5000, max_frame: int = DEFAULT_MAX_FRAME) -> bytes:
    """Ask the handset for a photo.

    Returns:
        Image bytes

    Raises:
        Timeout, RemoteError, Truncated, TransportClosed
    """
    req = TriggerRequest(op=TriggerOp.PHOTO, camera=int(camera))
    response = await request(transport, req, timeout_ms, max_frame)
    if response.status != STATUS_OK:
        raise RemoteError(f"photo request failed with status {response.status}",
                          status=response.status)
    logger.info("received {}-byte photo from {} camera", len(response.payload),
                Camera(camera).name.lower())
    return response.payload


async def serve_endpoint(endpoint: str, photo_fn: PhotoFn = capture_photo, *,
                         max_frame: int = DEFAULT_MAX_FRAME,
                         max_requests: Optional[int] = None) -> int:
    """Listen on ``host:port`` and serve connections one at a time.

    Returns:
        Requests answered in total (only returns when ``max_requests`` is reached)
    """
    host, port = parse_endpoint(endpoint)
    served = 0
    done = asyncio.Event()
    lock = asyncio.Lock()

    async def _on_connect(reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        nonlocal served
        async with lock:
            remaining = None if max_requests is None else max_requests - served
            if remaining is not None and remaining <= 0:
                writer.close()
                return
            served += await serve_trigger(StreamTransport(reader, writer), photo_fn,
                                          max_frame=max_frame, max_requests=remaining)
            if max_requests is not None and served >= max_requests:
                done.set()

    server = await asyncio.start_server(_on_connect, host, port)
    logger.info("trigger server listening on {}", endpoint)
    async with server:
        await done.wait()
    return served
