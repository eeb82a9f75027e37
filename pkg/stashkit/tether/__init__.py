"""USB-tether covert channel: plans, lifecycle and the remote photo trigger."""
from stashkit.tether.frames import (
    decode_frame,
    decode_request,
    decode_response,
    encode_frame,
    encode_request,
    encode_response,
)
from stashkit.tether.plans import MockExecutor, parse_endpoint, plan_down, plan_up
from stashkit.tether.session import TRANSITIONS, replay, transition
from stashkit.tether.transport import (
    LoopbackTransport,
    StreamTransport,
    Transport,
    read_frame,
    write_frame,
)
from stashkit.tether.trigger import ping, request_photo, serve_endpoint, serve_trigger

__all__ = [
    "LoopbackTransport",
    "MockExecutor",
    "StreamTransport",
    "TRANSITIONS",
    "Transport",
    "decode_frame",
    "decode_request",
    "decode_response",
    "encode_frame",
    "encode_request",
    "encode_response",
    "parse_endpoint",
    "ping",
    "plan_down",
    "plan_up",
    "read_frame",
    "replay",
    "request_photo",
    "serve_endpoint",
    "serve_trigger",
    "transition",
]
