"""xorshift64* keystream used to whiten stashed payloads.

Whitening defeats signature carving; it is not encryption.
"""
from typing import Iterator, Union

import numpy as np

from stashkit.errors import ZeroSeed

MASK64 = 0xFFFFFFFFFFFFFFFF
MULTIPLIER = 0x2545F4914F6CDD1D


def _words(seed: int, count: int) -> Iterator[int]:
    s = seed & MASK64
    for _ in range(count):
        s ^= s >> 12
        s ^= (s << 25) & MASK64
        s ^= s >> 27
        yield (s * MULTIPLIER) & MASK64


def keystream(seed: int, length: int) -> bytes:
    """Deterministic byte stream, 8 little-endian bytes per generator step.

    Args:
        seed: Nonzero 64-bit seed
        length: Bytes wanted (the last word is truncated)

    Returns:
        ``length`` bytes

    Raises:
        ZeroSeed: seed is 0 (xorshift would emit zeros forever)
    """
    if seed & MASK64 == 0:
        raise ZeroSeed("keystream seed must be nonzero")
    if length <= 0:
        return b""
    count = (length + 7) // 8
    words = np.fromiter(_words(seed, count), dtype=np.uint64, count=count)
    return words.astype("<u8").tobytes()[:length]


def obfuscate(data: Union[bytes, bytearray, memoryview], seed: int) -> bytes:
    """XOR ``data`` with ``keystream(seed)``; applying it twice restores the input."""
    if seed & MASK64 == 0:
        raise ZeroSeed("keystream seed must be nonzero")
    if len(data) == 0:
        return b""
    plain = np.frombuffer(data, dtype=np.uint8)
    key = np.frombuffer(keystream(seed, len(plain)), dtype=np.uint8)
    return np.bitwise_xor(plain, key).tobytes()
