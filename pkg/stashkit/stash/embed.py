"""Hide, recover, refresh and perturb a payload at the tail of a user-data image.

Region layout (headerless mode)::

    [ filesystem ... | safety margin | nonce | payload ]
                                             ^ image_size - payload_len

Indexed mode reserves the last 64 bytes for the footer and places the payload
directly before it.
"""
from typing import Optional, Sequence

import numpy as np
from loguru import logger

from stashkit.archive.newc import DEFAULT_GZIP_LEVEL, GZIP_MAGIC, pack, unpack
from stashkit.archive.tree import merge_entries
from stashkit.errors import CrcMismatch, OutOfBounds, PayloadTooLarge, ZeroSeed
from stashkit.observability.metrics import incr, timed
from stashkit.schemas import ArchiveEntry, StashManifest
from stashkit.stash.carve import DEFAULT_SIGNATURES, Signature, clean_fill, scan
from stashkit.stash.footer import FOOTER_SIZE, write_footer
from stashkit.stash.keystream import MASK64, obfuscate
from stashkit.utils.hashing import crc32
from stashkit.utils.io import ImageStore
from stashkit.utils.timebase import Clock, unix_seconds

MIB = 1 << 20
DEFAULT_NONCE_LEN = 4096
DEFAULT_MARGIN = MIB


def check_capacity(image_size: int, payload_len: int, nonce_len: int = DEFAULT_NONCE_LEN,
                   margin: int = DEFAULT_MARGIN, indexed: bool = False) -> int:
    """Verify the tail can hold payload, nonce region and safety margin.

    Args:
        image_size: Total image bytes
        payload_len: Payload bytes
        nonce_len: Nonce region bytes
        margin: Bytes kept free for the filesystem below the stash
        indexed: Whether the 64-byte footer is reserved as well

    Returns:
        Payload offset the stash would use

    Raises:
        PayloadTooLarge: The tail is too small
        ValueError: A negative length or margin
    """
    if nonce_len < 0 or margin < 0:
        raise ValueError(f"nonce_len ({nonce_len}) and margin ({margin}) must be >= 0")
    reserved = FOOTER_SIZE if indexed else 0
    needed = payload_len + nonce_len + margin + reserved
    if needed > image_size:
        raise PayloadTooLarge(
            f"payload of {payload_len} bytes needs {needed} bytes of tail space; "
            f"image holds {image_size}",
            payload_len=payload_len,
            image_size=image_size,
        )
    return image_size - reserved - payload_len


def check_manifest(image: ImageStore, manifest: StashManifest) -> None:
    """Raise OutOfBounds unless the manifest's regions fit inside ``image``."""
    size = len(image)
    if manifest.image_size != size:
        raise OutOfBounds(f"manifest describes a {manifest.image_size}-byte image, got {size}")
    if manifest.payload_end > size:
        raise OutOfBounds(
            f"payload [{manifest.payload_offset}, {manifest.payload_end}) exceeds image of "
            f"{size} bytes"
        )
    if manifest.nonce_end > size:
        raise OutOfBounds(f"nonce region ends at {manifest.nonce_end}, past image end {size}")
    if manifest.nonce_len and not (manifest.nonce_end <= manifest.payload_offset
                                   or manifest.payload_end <= manifest.nonce_offset):
        raise OutOfBounds("nonce region overlaps the payload")


def _default_rng(rng: Optional[np.random.Generator]) -> np.random.Generator:
    return rng if rng is not None else np.random.default_rng()


def pick_seed(payload: bytes, rng: Optional[np.random.Generator] = None,
              signatures: Sequence[Signature] = DEFAULT_SIGNATURES, attempts: int = 256) -> int:
    """Draw keystream seeds until the whitened payload carries no carving signature.

    Returns:
        A nonzero seed (the last one drawn if no clean seed turned up)
    """
    rng = _default_rng(rng)
    seed = 1
    for _ in range(attempts):
        seed = int.from_bytes(rng.bytes(8), "little") | 1
        if not scan(obfuscate(payload, seed), signatures):
            return seed
    logger.warning("no signature-free seed in {} attempts", attempts)
    return seed


@timed("embed")
def embed(image: ImageStore, payload: bytes, obfuscate_payload: bool = False,
          seed: Optional[int] = None, nonce_len: int = DEFAULT_NONCE_LEN, *,
          margin: int = DEFAULT_MARGIN, indexed: bool = False,
          rng: Optional[np.random.Generator] = None, clock: Optional[Clock] = None,
          signatures: Sequence[Signature] = DEFAULT_SIGNATURES) -> StashManifest:
    """Write ``payload`` at the image tail with a random nonce region below it.

    Args:
        image: Mutable byte store (bytearray or writable mmap)
        payload: Bytes to hide
        obfuscate_payload: XOR the payload with ``keystream(seed)``
        seed: Nonzero 64-bit keystream seed (required when obfuscating)
        nonce_len: Bytes of nonce region directly before the payload
        margin: Free space kept below the stash
        indexed: Also write the discoverable 64-byte footer
        rng: Source for nonce bytes (OS entropy when None)
        clock: Source for ``created_unix``
        signatures: Patterns scrubbed from random fill

    Returns:
        Manifest locating the payload

    Raises:
        PayloadTooLarge, ZeroSeed, ValueError (negative nonce_len or margin; image untouched)
    """
    if obfuscate_payload and not (seed and seed & MASK64):
        raise ZeroSeed("obfuscation requires a nonzero 64-bit seed")
    if seed is not None and not 0 <= seed <= MASK64:
        raise ZeroSeed(f"seed {seed:#x} does not fit in 64 bits")

    image_size = len(image)
    payload_offset = check_capacity(image_size, len(payload), nonce_len, margin, indexed)
    payload_end = payload_offset + len(payload)
    nonce_offset = payload_offset - nonce_len

    body = obfuscate(payload, seed) if obfuscate_payload else payload
    image[payload_offset:payload_end] = body
    clean_fill(image, nonce_offset, payload_offset, _default_rng(rng), signatures)

    manifest = StashManifest(
        image_size=image_size,
        payload_offset=payload_offset,
        payload_len=len(payload),
        payload_crc32=crc32(payload),
        obfuscated=obfuscate_payload,
        seed=seed if obfuscate_payload else None,
        nonce_offset=nonce_offset,
        nonce_len=nonce_len,
        created_unix=unix_seconds(clock),
    )
    if indexed:
        write_footer(image, manifest)

    incr("embeds")
    logger.info("embedded {} bytes at offset {} (obfuscated={}, indexed={})",
                len(payload), payload_offset, obfuscate_payload, indexed)
    return manifest


@timed("extract")
def extract(image: ImageStore, manifest: StashManifest) -> bytes:
    """Read back and de-obfuscate the payload.

    Raises:
        OutOfBounds: Manifest regions do not fit the image
        CrcMismatch: Recovered bytes fail the manifest checksum
    """
    check_manifest(image, manifest)
    data = bytes(image[manifest.payload_offset:manifest.payload_end])
    if manifest.obfuscated:
        data = obfuscate(data, manifest.seed or 0)
    actual = crc32(data)
    if actual != manifest.payload_crc32:
        raise CrcMismatch(
            f"payload crc32 {actual:#010x} != manifest {manifest.payload_crc32:#010x}",
            expected=manifest.payload_crc32,
            actual=actual,
        )
    logger.debug("extracted {} bytes from offset {}", len(data), manifest.payload_offset)
    return data


def scramble(image: ImageStore, manifest: StashManifest,
             entropy: Optional[np.random.Generator] = None,
             signatures: Sequence[Signature] = DEFAULT_SIGNATURES) -> StashManifest:
    """Refill the nonce region so the full-image digest changes.

    The payload region is left bit-identical. A zero-length nonce region makes
    this a no-op.

    Raises:
        OutOfBounds
    """
    check_manifest(image, manifest)
    if manifest.nonce_len == 0:
        return manifest
    clean_fill(image, manifest.nonce_offset, manifest.nonce_end, _default_rng(entropy),
               signatures)
    incr("scrambles")
    logger.debug("scrambled nonce region [{}, {})", manifest.nonce_offset, manifest.nonce_end)
    return manifest


def is_indexed(image: ImageStore, manifest: StashManifest) -> bool:
    return manifest.payload_end == len(image) - FOOTER_SIZE


@timed("update")
def update(image: ImageStore, manifest: StashManifest, overlay: Sequence[ArchiveEntry], *,
           margin: int = DEFAULT_MARGIN, gzip_level: int = DEFAULT_GZIP_LEVEL,
           rng: Optional[np.random.Generator] = None, clock: Optional[Clock] = None,
           signatures: Sequence[Signature] = DEFAULT_SIGNATURES) -> StashManifest:
    """Unpack the stashed archive, apply ``overlay`` by name and re-embed it.

    The repacked archive keeps the original compression setting. When the new
    payload is shorter, the vacated bytes are overwritten with signature-free
    random fill so no stale plaintext tail survives.

    Returns:
        Manifest for the new payload
    """
    rng = _default_rng(rng)
    payload = extract(image, manifest)
    compressed = payload[:2] == GZIP_MAGIC
    merged = merge_entries(unpack(payload), overlay)
    new_payload = pack(merged, compress=compressed, gzip_level=gzip_level)

    new_manifest = embed(
        image,
        new_payload,
        manifest.obfuscated,
        manifest.seed,
        manifest.nonce_len,
        margin=margin,
        indexed=is_indexed(image, manifest),
        rng=rng,
        clock=clock,
        signatures=signatures,
    )
    if new_manifest.nonce_offset > manifest.nonce_offset:
        clean_fill(image, manifest.nonce_offset, new_manifest.nonce_offset, rng, signatures)
    logger.info("updated stash: {} -> {} bytes, {} overlay entries",
                manifest.payload_len, new_manifest.payload_len, len(overlay))
    return new_manifest
