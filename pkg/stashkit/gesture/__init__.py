"""Input-event decoding, swipe detection and the camera trigger."""
from stashkit.gesture.bindings import (
    DEFAULT_BINDINGS,
    GestureBinding,
    bindings_from_config,
    directory_sink,
    watch,
)
from stashkit.gesture.camera import PHOTO_SIZE, PPM_HEADER, capture_photo
from stashkit.gesture.detect import SwipeDetector, detect, select_axis
from stashkit.gesture.events import EVENT_SIZE, decode_events, encode_events, iter_records

__all__ = [
    "DEFAULT_BINDINGS",
    "EVENT_SIZE",
    "GestureBinding",
    "PHOTO_SIZE",
    "PPM_HEADER",
    "SwipeDetector",
    "bindings_from_config",
    "capture_photo",
    "decode_events",
    "detect",
    "directory_sink",
    "encode_events",
    "iter_records",
    "select_axis",
    "watch",
]
