"""Gesture-to-action bindings and the live watch loop."""
import os
from typing import BinaryIO, Callable, Iterable, List, Mapping, Optional

from loguru import logger
from pydantic import BaseModel, ConfigDict

from stashkit.errors import ConfigError
from stashkit.gesture.camera import capture_photo
from stashkit.gesture.detect import SwipeDetector
from stashkit.gesture.events import iter_records
from stashkit.schemas import Camera, Gesture, GestureConfig
from stashkit.utils.io import ensure_dir, write_bytes
from stashkit.utils.timebase import Clock

PhotoSink = Callable[[Gesture, Camera, bytes], None]


class GestureBinding(BaseModel):
    """Swipe direction bound to a camera."""
    model_config = ConfigDict(frozen=True)

    direction: str  # "right" or "left"
    camera: Camera


DEFAULT_BINDINGS = (
    GestureBinding(direction="right", camera=Camera.BACK),
    GestureBinding(direction="left", camera=Camera.FRONT),
)


def bindings_from_config(mapping: Mapping[str, str]) -> List[GestureBinding]:
    """Build bindings from a ``direction -> camera name`` mapping.

    Raises:
        ConfigError: Unknown direction or camera name
    """
    result = []
    for direction, camera in mapping.items():
        if direction not in ("right", "left"):
            raise ConfigError(f"binding {direction}: {camera}: unknown swipe direction")
        try:
            bound = Camera[str(camera).upper()]
        except KeyError:
            raise ConfigError(
                f"binding {direction}: {camera}: camera must be back or front") from None
        result.append(GestureBinding(direction=direction, camera=bound))
    return result


def resolve(gesture: Gesture, bindings: Iterable[GestureBinding]) -> Optional[Camera]:
    for binding in bindings:
        if binding.direction == gesture.direction:
            return binding.camera
    return None


def directory_sink(out_dir: str) -> PhotoSink:
    """Sink writing ``photo_<start_ms>_<camera>.ppm`` files under ``out_dir``."""
    ensure_dir(out_dir)

    def _write(gesture: Gesture, camera: Camera, image: bytes) -> None:
        path = os.path.join(out_dir, f"photo_{gesture.start_ms}_{camera.name.lower()}.ppm")
        write_bytes(path, image)
        logger.info("photo saved: {}", path)

    return _write


def watch(source: BinaryIO, config: Optional[GestureConfig] = None,
          bindings: Iterable[GestureBinding] = DEFAULT_BINDINGS,
          sink: Optional[PhotoSink] = None, clock: Optional[Clock] = None) -> int:
    """Follow an event stream and take a photo for every bound swipe.

    Detection runs as frames complete, so photos are taken while the stream is
    still open. Unbound directions are logged and ignored.

    Args:
        source: Replayable byte source of packed records
        config: Detection parameters
        bindings: Direction to camera table
        sink: Receives each captured image (discarded when None)
        clock: Timestamp source for captures

    Returns:
        Number of photos taken

    Raises:
        TruncatedRecord, UnorderedEvents
    """
    table = list(bindings)
    detector = SwipeDetector(config or GestureConfig())
    photos = 0

    def _dispatch(found: List[Gesture]) -> None:
        nonlocal photos
        for gesture in found:
            camera = resolve(gesture, table)
            if camera is None:
                logger.debug("no binding for {} swipe", gesture.direction)
                continue
            image = capture_photo(camera, clock)
            photos += 1
            if sink is not None:
                sink(gesture, camera, image)

    for event in iter_records(source):
        _dispatch(detector.feed(event))
    _dispatch(detector.finish())
    logger.info("watch finished: {} photos", photos)
    return photos
