"""Signature carving oracle and signature-free random fill."""
from typing import List, Optional, Sequence, Tuple

import numpy as np

from stashkit.errors import EmptyPattern, PatternTooLong
from stashkit.schemas import SignatureHit
from stashkit.utils.io import ImageStore

MAX_PATTERN = 64

Signature = Tuple[str, bytes]

DEFAULT_SIGNATURES: List[Signature] = [
    ("gzip", b"\x1f\x8b"),
    ("png", b"\x89PNG"),
    ("elf", b"\x7fELF"),
    ("jpeg", b"\xff\xd8\xff"),
]


def _check_patterns(signatures: Sequence[Signature]) -> None:
    for name, pattern in signatures:
        if not pattern:
            raise EmptyPattern(f"signature {name!r} has an empty pattern", signature=name)
        if len(pattern) > MAX_PATTERN:
            raise PatternTooLong(
                f"signature {name!r} is {len(pattern)} bytes (max {MAX_PATTERN})",
                signature=name,
            )


def _find_all(image: ImageStore, pattern: bytes, start: int, end: int) -> List[int]:
    offsets = []
    pos = image.find(pattern, start, end)
    while pos != -1:
        offsets.append(pos)
        pos = image.find(pattern, pos + 1, end)
    return offsets


def scan(image: ImageStore, signatures: Sequence[Signature] = DEFAULT_SIGNATURES) -> List[SignatureHit]:
    """Report every occurrence of every pattern, overlapping matches included.

    Args:
        image: Byte store to search
        signatures: (name, pattern) pairs, patterns 1-64 bytes

    Returns:
        Hits in ascending offset order (signature order breaks ties)

    Raises:
        EmptyPattern, PatternTooLong
    """
    _check_patterns(signatures)
    hits: List[Tuple[int, int, str]] = []
    for order, (name, pattern) in enumerate(signatures):
        for offset in _find_all(image, pattern, 0, len(image)):
            hits.append((offset, order, name))
    hits.sort()
    return [SignatureHit(signature_name=name, offset=offset) for offset, _, name in hits]


def _safe_byte(signatures: Sequence[Signature]) -> int:
    used = set()
    for _, pattern in signatures:
        used.update(pattern)
    for value in range(256):
        if value not in used:
            return value
    raise ValueError("signatures cover every byte value; no neutral fill byte exists")


def scrub_region(image: ImageStore, start: int, end: int,
                 signatures: Sequence[Signature] = DEFAULT_SIGNATURES) -> int:
    """Break every signature match that overlaps ``[start, end)``.

    Only bytes inside the region are modified. Matches straddling the region
    edges are considered, so random fill never completes a header begun by
    neighbouring data.

    Args:
        image: Byte store
        start: Region start
        end: Region end (exclusive)
        signatures: Patterns to suppress

    Returns:
        Number of bytes rewritten
    """
    if end <= start or not signatures:
        return 0
    _check_patterns(signatures)
    neutral = _safe_byte(signatures)
    longest = max(len(p) for _, p in signatures)
    lo = max(0, start - longest + 1)
    hi = min(len(image), end + longest - 1)

    rewritten = 0
    for _, pattern in signatures:
        for offset in _find_all(image, pattern, lo, hi):
            if offset + len(pattern) <= start or offset >= end:
                continue
            # a byte outside every pattern cannot take part in a new match
            pos = max(offset, start)
            if image[pos] != neutral:
                image[pos] = neutral
                rewritten += 1
    return rewritten


def clean_fill(image: ImageStore, start: int, end: int, rng: np.random.Generator,
               signatures: Optional[Sequence[Signature]] = None) -> None:
    """Overwrite ``[start, end)`` with random bytes free of carving signatures."""
    if end <= start:
        return
    image[start:end] = rng.bytes(end - start)
    scrub_region(image, start, end, DEFAULT_SIGNATURES if signatures is None else signatures)
