"""Tether plans, tunnel lifecycle, framing and the remote photo trigger."""
import asyncio
import socket

import pytest

from stashkit.errors import (
    BadCidr,
    BadEndpoint,
    FrameTooLarge,
    InvalidTransition,
    MalformedRequest,
    NotUp,
    RemoteError,
    Timeout,
    TransportClosed,
    Truncated,
)
from stashkit.gesture import PHOTO_SIZE, capture_photo
from stashkit.observability.metrics import METRICS
from stashkit.qa.oracles import TRANSITION_ORACLE
from stashkit.schemas import (
    Camera,
    TransitionRecord,
    TriggerRequest,
    TriggerResponse,
    TunnelEvent,
    TunnelSession,
    TunnelState,
)
from stashkit.tether import (
    TRANSITIONS,
    LoopbackTransport,
    MockExecutor,
    StreamTransport,
    decode_frame,
    decode_request,
    decode_response,
    encode_frame,
    encode_request,
    encode_response,
    parse_endpoint,
    ping,
    plan_down,
    plan_up,
    read_frame,
    replay,
    request_photo,
    serve_endpoint,
    serve_trigger,
    transition,
    write_frame,
)
from stashkit.utils.timebase import fixed_clock


def _camera(cam: Camera) -> bytes:
    return capture_photo(cam, fixed_clock(1_700_000_000))


def _walk(*events: str) -> TunnelSession:
    session = TunnelSession()
    for name in events:
        session = transition(session, TunnelEvent(name))
    return session


# Plans

def test_plan_up_and_down_with_mock_executor():
    up = plan_up()
    executor = MockExecutor()
    assert executor.usb_function == "charge_only"
    lines = executor.execute(up)
    assert lines == [
        "ACTION set_usb_function rndis",
        "ACTION iface_up rndis0",
        "ACTION assign_addr 192.168.42.129/24",
        "ACTION start_tunnel 127.0.0.1:2222",
    ]
    assert executor.usb_function == "rndis"
    assert executor.ifaces == {"rndis0": "192.168.42.129/24"}
    assert executor.tunnel == "127.0.0.1:2222"

    session = _walk("up_cmd", "iface_ok", "tunnel_ok", "data")
    down = plan_down(session)
    assert executor.execute(down) == [
        "ACTION stop_tunnel", "ACTION iface_down rndis0", "ACTION set_usb_function charge_only",
    ]
    assert executor.log == [a.render() for a in up.actions + down.actions]
    assert executor.usb_function == "charge_only"
    assert executor.ifaces == {} and executor.tunnel is None


def test_plan_up_custom_arguments():
    plan = plan_up("usb0", "10.0.0.2/30", "[fe80::1]:8022")
    assert [a.args for a in plan.actions] == [("rndis",), ("usb0",), ("10.0.0.2/30",),
                                              ("[fe80::1]:8022",)]
    with pytest.raises(ValueError):
        plan_up(iface="")


@pytest.mark.parametrize("endpoint", ["hostonly", ":22", "host:", "host:0", "host:70000",
                                      "host:ssh", "[]:22"])
def test_bad_endpoint(endpoint):
    with pytest.raises(BadEndpoint):
        plan_up(endpoint=endpoint)


def test_parse_endpoint():
    assert parse_endpoint("127.0.0.1:2222") == ("127.0.0.1", 2222)
    assert parse_endpoint("[::1]:22") == ("::1", 22)


@pytest.mark.parametrize("cidr", ["192.168.42.129", "300.1.1.1/24", "10.0.0.1/33", "x/8"])
def test_bad_cidr(cidr):
    with pytest.raises(BadCidr):
        plan_up(cidr=cidr)


@pytest.mark.parametrize("events", [(), ("up_cmd",), ("up_cmd", "iface_ok")])
def test_plan_down_needs_a_tunnel(events):
    with pytest.raises(NotUp):
        plan_down(_walk(*events))


def test_plan_down_from_error_state():
    assert len(plan_down(_walk("up_cmd", "fail")).actions) == 3


# Lifecycle

def test_table_matches_oracle_for_every_pair():
    checked = 0
    for state in TunnelState:
        for event in TunnelEvent:
            expected = TRANSITION_ORACLE[state.value].get(event.value)
            session = TunnelSession(state=state)
            if expected is None:
                with pytest.raises(InvalidTransition):
                    transition(session, event)
            else:
                assert transition(session, event).state.value == expected
            checked += 1
    assert checked == len(TunnelState) * len(TunnelEvent) == 30
    assert len(TRANSITIONS) == sum(len(row) for row in TRANSITION_ORACLE.values())


def test_transition_records_log_without_mutating():
    start = TunnelSession()
    after = transition(start, TunnelEvent.UP_CMD)
    assert start.state is TunnelState.DOWN and start.log == ()
    assert after.log == (TransitionRecord(event=TunnelEvent.UP_CMD, before=TunnelState.DOWN,
                                          after=TunnelState.IFACE_UP),)


def test_replay():
    session = _walk("up_cmd", "iface_ok", "tunnel_ok", "data", "data", "down_cmd", "up_cmd")
    assert replay(session.log) is TunnelState.IFACE_UP
    assert replay(()) is TunnelState.DOWN

    forged = list(session.log)
    forged[1] = TransitionRecord(event=TunnelEvent.IFACE_OK, before=TunnelState.IFACE_UP,
                                 after=TunnelState.ACTIVE)
    with pytest.raises(InvalidTransition):
        replay(forged)
    with pytest.raises(InvalidTransition):
        replay(session.log[1:])


def test_active_requires_tunnel_ok_after_up():
    """Every valid event sequence up to length 8 reaches Active only via up_cmd then tunnel_ok."""
    explored = 0

    def dfs(session: TunnelSession, tunnel_since_up: bool, depth: int) -> None:
        nonlocal explored
        explored += 1
        if depth == 8:
            return
        for event in TunnelEvent:
            try:
                nxt = transition(session, event)
            except InvalidTransition:
                continue
            seen = tunnel_since_up
            if event is TunnelEvent.UP_CMD:
                seen = False
            elif event is TunnelEvent.TUNNEL_OK:
                seen = True
            if nxt.state is TunnelState.ACTIVE:
                assert seen
            dfs(nxt, seen, depth + 1)

    dfs(TunnelSession(), False, 0)
    assert explored > 1000


# Frames

def test_frame_encoding():
    assert encode_frame(b"") == b"\x00\x00\x00\x00"
    assert encode_frame(b"ab") == b"\x02\x00\x00\x00ab"
    stream = encode_frame(b"first") + encode_frame(b"") + b"\x01"
    body, rest = decode_frame(stream)
    assert body == b"first"
    body, rest = decode_frame(rest)
    assert body == b"" and rest == b"\x01"


def test_frame_errors():
    with pytest.raises(Truncated):
        decode_frame(b"\x05\x00\x00")
    with pytest.raises(Truncated):
        decode_frame(b"\x05\x00\x00\x00abcd")
    with pytest.raises(FrameTooLarge):
        decode_frame(b"\xff\xff\xff\x00", max_frame=1024)


def test_request_and_response_bodies():
    assert encode_request(TriggerRequest(op=1, camera=1)) == b"\x01\x01\x01\x00"
    assert decode_request(b"\x01\x02\x00\x00") == TriggerRequest()
    for bad in (b"\x01\x02\x00", b"\x09\x02\x00\x00", b"\x01\x02\x00\x07"):
        with pytest.raises(MalformedRequest):
            decode_request(bad)

    assert encode_response(TriggerResponse(payload=b"xyz")) == b"\x01\x00\x03\x00\x00\x00xyz"
    assert decode_response(b"\x01\x01\x00\x00\x00\x00").status == 1
    with pytest.raises(Truncated):
        decode_response(b"\x01\x00\x05\x00\x00\x00abc")
    with pytest.raises(RemoteError):
        decode_response(b"\x01\x00\x01\x00\x00\x00ab")
    with pytest.raises(RemoteError):
        decode_response(b"\x02\x00\x00\x00\x00\x00")


# Trigger over loopback

async def test_ping_and_photo():
    client, server = LoopbackTransport.pair()
    task = asyncio.create_task(serve_trigger(server, _camera))
    await ping(client)
    photo = await request_photo(client, Camera.FRONT)
    assert len(photo) == PHOTO_SIZE == 921615
    assert photo.startswith(b"P6\n640 480\n255\n")
    assert photo[15] == 1
    assert photo == _camera(Camera.FRONT)
    await client.close()
    assert await task == 2
    assert METRICS["requests_served"] == 2


async def test_bad_requests_get_error_status_and_server_continues():
    client, server = LoopbackTransport.pair()
    task = asyncio.create_task(serve_trigger(server, _camera))
    for body in (b"\x09\x02\x00\x00", b"\x01\x07\x00\x00", b"\x01\x01\x05\x00", b"\x01"):
        await write_frame(client, body)
        response = decode_response(await read_frame(client))
        assert response.status == 1 and response.payload == b""
    await ping(client)
    await client.close()
    assert await task == 5


async def test_thousand_pings_in_order():
    client, server = LoopbackTransport.pair()
    task = asyncio.create_task(serve_trigger(server, _camera))
    for _ in range(1000):
        await ping(client)
    await client.close()
    assert await task == 1000


async def test_max_requests_closes_connection():
    client, server = LoopbackTransport.pair()
    task = asyncio.create_task(serve_trigger(server, _camera, max_requests=1))
    await ping(client)
    assert await task == 1
    with pytest.raises(TransportClosed):
        await ping(client)


async def test_oversized_frame_is_answered_then_dropped():
    client, server = LoopbackTransport.pair()
    task = asyncio.create_task(serve_trigger(server, _camera, max_frame=16))
    await client.write(b"\x00\x10\x00\x00")
    response = decode_response(await read_frame(client))
    assert response.status == 1
    assert await task == 1
    with pytest.raises(TransportClosed):
        await read_frame(client)


async def test_timeout_without_server():
    client, _server = LoopbackTransport.pair()
    with pytest.raises(Timeout):
        await ping(client, timeout_ms=50)


async def test_peer_closed():
    client, server = LoopbackTransport.pair()
    await server.close()
    with pytest.raises(TransportClosed):
        await ping(client)


async def test_peer_closes_mid_frame():
    client, server = LoopbackTransport.pair()
    await server.write(b"\x05\x00\x00\x00ab")
    await server.close()
    with pytest.raises(Truncated):
        await read_frame(client)


# Trigger over TCP

def _free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


async def test_stream_transport_round_trip():
    async def on_connect(reader, writer):
        await serve_trigger(StreamTransport(reader, writer), _camera)

    server = await asyncio.start_server(on_connect, "127.0.0.1", 0)
    port = server.sockets[0].getsockname()[1]
    async with server:
        client = await StreamTransport.connect(f"127.0.0.1:{port}")
        await ping(client)
        photo = await request_photo(client, Camera.BACK)
        assert photo[15] == 0 and len(photo) == PHOTO_SIZE
        await client.close()


async def test_serve_endpoint_stops_after_max_requests():
    endpoint = f"127.0.0.1:{_free_port()}"
    task = asyncio.create_task(serve_endpoint(endpoint, _camera, max_requests=3))
    client = None
    for _ in range(100):
        try:
            client = await StreamTransport.connect(endpoint, timeout_ms=200)
            break
        except TransportClosed:
            await asyncio.sleep(0.02)
    assert client is not None
    for _ in range(3):
        await ping(client)
    assert await asyncio.wait_for(task, 5) == 3
    await client.close()


async def test_connect_refused():
    with pytest.raises(TransportClosed):
        await StreamTransport.connect(f"127.0.0.1:{_free_port()}", timeout_ms=1000)
