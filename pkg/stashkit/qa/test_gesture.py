"""Input-event decoding, swipe detection, camera stub and the watch loop."""
import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stashkit.errors import ConfigError, TruncatedRecord, UnorderedEvents
from stashkit.gesture import (
    PHOTO_SIZE,
    SwipeDetector,
    bindings_from_config,
    capture_photo,
    decode_events,
    detect,
    directory_sink,
    encode_events,
    iter_records,
    select_axis,
    watch,
)
from stashkit.observability.metrics import METRICS
from stashkit.qa.fixtures import random_event_stream, touch_events
from stashkit.qa.oracles import swipe_oracle
from stashkit.schemas import ABS_MT_POSITION_X, ABS_X, EV_ABS, EV_SYN, Camera, GestureConfig, InputEvent
from stashkit.utils.timebase import fixed_clock

BASE_MS = 1_700_000_000_000
CONFIG = GestureConfig(threshold=120, window_ms=400)


def _as_tuples(gestures):
    return [(g.start_ms, g.end_ms, g.displacement) for g in gestures]


def test_decode_zero_record():
    assert decode_events(bytes(16)) == [InputEvent(tv_sec=0, tv_usec=0, etype=EV_SYN, code=0, value=0)]


def test_decode_little_endian_fields():
    raw = (
        (1).to_bytes(4, "little") + (2).to_bytes(4, "little") + (3).to_bytes(2, "little")
        + (0x35).to_bytes(2, "little") + (100).to_bytes(4, "little")
        + (7).to_bytes(4, "little") + bytes(4) + (3).to_bytes(2, "little") + bytes(2)
        + (-5).to_bytes(4, "little", signed=True)
    )
    first, second = decode_events(raw)
    assert first == InputEvent(tv_sec=1, tv_usec=2, etype=3, code=0x35, value=100)
    assert second.value == -5 and second.tv_sec == 7
    assert encode_events([first, second]) == raw


def test_partial_record_rejected():
    with pytest.raises(TruncatedRecord):
        decode_events(bytes(17))
    with pytest.raises(TruncatedRecord):
        list(iter_records(io.BytesIO(bytes(40))))


def test_iter_records_reassembles_reads():
    events = touch_events([(i * 10, i) for i in range(300)])
    assert list(iter_records(io.BytesIO(encode_events(events)), batch=7)) == events


def test_single_swipe():
    events = touch_events([(0, 100), (50, 140), (100, 180), (150, 220), (200, 260)])
    assert _as_tuples(detect(events, CONFIG)) == [(BASE_MS, BASE_MS + 200, 160)]
    assert detect(events, CONFIG)[0].direction == "right"
    assert METRICS["gestures"] == 2


def test_below_threshold():
    assert detect(touch_events([(0, 100), (100, 120), (200, 150)]), CONFIG) == []


def test_two_separated_swipes():
    events = touch_events([(0, 500), (100, 400), (200, 300), (1000, 300), (1100, 450)])
    found = detect(events, CONFIG)
    assert _as_tuples(found) == [(BASE_MS, BASE_MS + 200, -200),
                                 (BASE_MS + 1000, BASE_MS + 1100, 150)]
    assert [g.direction for g in found] == ["left", "right"]


def test_threshold_boundary():
    assert len(detect(touch_events([(0, 0), (100, 120)]), CONFIG)) == 1
    assert detect(touch_events([(0, 0), (100, 119)]), CONFIG) == []


def test_window_boundary():
    assert len(detect(touch_events([(0, 0), (400, 200)]), CONFIG)) == 1
    assert detect(touch_events([(0, 0), (401, 200)]), CONFIG) == []


def test_unordered_events():
    events = touch_events([(100, 0), (50, 200)])
    with pytest.raises(UnorderedEvents):
        detect(events, CONFIG)


def test_fallback_axis():
    events = touch_events([(0, 10), (100, 200)], code=ABS_X)
    assert select_axis(events, CONFIG) == ABS_X
    assert _as_tuples(detect(events, CONFIG)) == [(BASE_MS, BASE_MS + 100, 190)]
    mixed = events + touch_events([(300, 0)], code=ABS_MT_POSITION_X)
    assert select_axis(mixed, CONFIG) == ABS_MT_POSITION_X


def test_streaming_detector_locks_axis_on_first_frame():
    detector = SwipeDetector(CONFIG)
    frame = [
        InputEvent(tv_sec=1, etype=EV_ABS, code=ABS_X, value=5),
        InputEvent(tv_sec=1, etype=EV_ABS, code=ABS_MT_POSITION_X, value=5),
        InputEvent(tv_sec=1, etype=EV_SYN),
    ]
    for event in frame:
        detector.feed(event)
    assert detector.axis == ABS_MT_POSITION_X


def test_matches_brute_force_oracle():
    rnd = random.Random(2024)
    for i in range(300):
        codes = (ABS_MT_POSITION_X, 0x36) if i % 3 else (ABS_X, 0x36)
        events = random_event_stream(rnd, rnd.randint(0, 500), codes)
        threshold = rnd.choice([60, 120, 200])
        window = rnd.choice([100, 400, 900])
        config = GestureConfig(threshold=threshold, window_ms=window)
        expected = swipe_oracle(events, ABS_MT_POSITION_X, ABS_X, threshold, window)
        assert _as_tuples(detect(events, config)) == expected


@given(st.integers(min_value=0, max_value=2**32), st.integers(min_value=2, max_value=9))
@settings(max_examples=50, deadline=None)
def test_scaling_invariance(seed, factor):
    events = random_event_stream(random.Random(seed), 200)
    scaled = [e.model_copy(update={"value": e.value * factor}) if e.etype == EV_ABS else e
              for e in events]
    base = detect(events, GestureConfig(threshold=100))
    assert len(detect(scaled, GestureConfig(threshold=100 * factor))) == len(base)


def test_capture_photo_layout():
    photo = capture_photo(Camera.FRONT, fixed_clock(0x0102030405))
    assert len(photo) == PHOTO_SIZE == 921615
    assert photo[:15] == b"P6\n640 480\n255\n"
    assert photo[15] == 1 and photo[16] == 0
    assert photo[17:25] == (0x0102030405).to_bytes(8, "little")
    assert photo[25:27] == b"\x00\x00"
    x, y = 300, 2
    offset = 15 + (y * 640 + x) * 3
    assert photo[offset:offset + 3] == bytes([300 % 256, 2, (300 + 2 + 1) % 256])
    assert photo == capture_photo(Camera.FRONT, fixed_clock(0x0102030405))


def test_capture_photo_back_camera():
    photo = capture_photo(Camera.BACK, fixed_clock(0))
    assert photo.startswith(b"P6\n640 480\n255\n\x00")
    assert photo[-3:] == bytes([639 % 256, 479 % 256, (639 + 479) % 256])


def test_watch_triggers_bound_cameras(tmp_path):
    events = (touch_events([(0, 100), (100, 300)])
              + touch_events([(2000, 900), (2100, 700)]))
    taken = []
    photos = watch(io.BytesIO(encode_events(events)), CONFIG,
                   bindings_from_config({"right": "back", "left": "front"}),
                   lambda gesture, camera, image: taken.append((gesture.direction, camera, image[15])),
                   fixed_clock(42))
    assert photos == 2
    assert taken == [("right", Camera.BACK, 0), ("left", Camera.FRONT, 1)]


def test_watch_skips_unbound_directions(tmp_path):
    events = touch_events([(0, 900), (100, 700)])
    sink = directory_sink(str(tmp_path / "photos"))
    bindings = bindings_from_config({"right": "back"})
    assert watch(io.BytesIO(encode_events(events)), CONFIG, bindings, sink) == 0
    assert list((tmp_path / "photos").iterdir()) == []

    events = touch_events([(0, 100), (100, 300)])
    assert watch(io.BytesIO(encode_events(events)), CONFIG, bindings, sink) == 1
    (saved,) = (tmp_path / "photos").iterdir()
    assert saved.name == f"photo_{BASE_MS}_back.ppm"
    assert saved.stat().st_size == PHOTO_SIZE


@pytest.mark.parametrize("mapping, word", [
    ({"up": "back"}, "direction"),
    ({"right": "side"}, "camera"),
])
def test_bad_bindings_are_config_errors(mapping, word):
    with pytest.raises(ConfigError, match=word):
        bindings_from_config(mapping)
