"""Deterministic camera stub producing binary PPM frames."""
import struct
from typing import Optional

import numpy as np

from stashkit.schemas import Camera
from stashkit.utils.timebase import Clock, unix_seconds

WIDTH = 640
HEIGHT = 480
PPM_HEADER = b"P6\n%d %d\n255\n" % (WIDTH, HEIGHT)
PHOTO_SIZE = len(PPM_HEADER) + WIDTH * HEIGHT * 3

# camera id, zero, u64 seconds, two zeros
_STAMP = struct.Struct("<BBQ2x")


def _gradient(camera: int) -> np.ndarray:
    y, x = np.mgrid[0:HEIGHT, 0:WIDTH]
    pixels = np.empty((HEIGHT, WIDTH, 3), dtype=np.uint8)
    pixels[..., 0] = x % 256
    pixels[..., 1] = y % 256
    pixels[..., 2] = (x + y + camera) % 256
    return pixels


def capture_photo(camera: Camera, clock: Optional[Clock] = None) -> bytes:
    """Render a 640x480 test frame stamped with the camera id and capture time.

    Args:
        camera: Back (0) or Front (1)
        clock: Source of the embedded unix seconds

    Returns:
        921615-byte PPM P6 image
    """
    cam = int(camera)
    raw = bytearray(_gradient(cam).tobytes())
    raw[:_STAMP.size] = _STAMP.pack(cam, 0, unix_seconds(clock) & 0xFFFFFFFFFFFFFFFF)
    return PPM_HEADER + bytes(raw)
