"""Digest helpers for images and payloads."""
import hashlib
import zlib
from typing import Union

ByteLike = Union[bytes, bytearray, memoryview]


def sha256_bytes(data: ByteLike) -> str:
    """Compute SHA256 hash of an in-memory byte store (bytes, bytearray, mmap).
    
    Args:
        data: Bytes-like object
        
    Returns:
        Hexadecimal SHA256 hash
    """
    h = hashlib.sha256()
    view = memoryview(data)
    for start in range(0, len(view), 1 << 20):
        h.update(view[start:start + (1 << 20)])
    return h.hexdigest()


def crc32(data: ByteLike, value: int = 0) -> int:
    """IEEE CRC-32 (reflected, polynomial 0xEDB88320).

    Args:
        data: Bytes-like object
        value: Running CRC to continue from

    Returns:
        Unsigned 32-bit checksum
    """
    return zlib.crc32(data, value) & 0xFFFFFFFF
