"""Optional 64-byte index footer written at the very end of an image.

Layout (little-endian)::

    magic "CHRSTASH" | version u16 | flags u16 (bit0 = obfuscated) | payload_len u64
    payload_crc32 u32 | seed u64 | nonce_offset u64 | nonce_len u32 | zero padding
    footer_crc32 u32 (over the first 60 bytes)

The footer makes the stash discoverable; headerless mode is the default.
"""
import struct

from stashkit.errors import FooterNotFound
from stashkit.schemas import StashManifest
from stashkit.utils.hashing import crc32
from stashkit.utils.io import ImageStore

FOOTER_MAGIC = b"CHRSTASH"
FOOTER_VERSION = 1
FOOTER_SIZE = 64
FLAG_OBFUSCATED = 0x0001

_BODY = struct.Struct("<8sHHQIQQI16x")
_CRC = struct.Struct("<I")

assert _BODY.size + _CRC.size == FOOTER_SIZE


def encode_footer(manifest: StashManifest) -> bytes:
    flags = FLAG_OBFUSCATED if manifest.obfuscated else 0
    body = _BODY.pack(
        FOOTER_MAGIC,
        FOOTER_VERSION,
        flags,
        manifest.payload_len,
        manifest.payload_crc32,
        manifest.seed or 0,
        manifest.nonce_offset,
        manifest.nonce_len,
    )
    return body + _CRC.pack(crc32(body))


def write_footer(image: ImageStore, manifest: StashManifest) -> None:
    size = len(image)
    image[size - FOOTER_SIZE:size] = encode_footer(manifest)


def locate(image: ImageStore) -> StashManifest:
    """Rebuild a manifest from the footer at the end of ``image``.

    Args:
        image: Byte store written in indexed mode

    Returns:
        Manifest (``created_unix`` is not stored in the footer and reads as 0)

    Raises:
        FooterNotFound: Image too small, wrong magic/version or footer CRC mismatch
    """
    size = len(image)
    if size < FOOTER_SIZE:
        raise FooterNotFound(f"image of {size} bytes cannot hold a footer")
    raw = bytes(image[size - FOOTER_SIZE:size])
    body, (stored_crc,) = raw[:_BODY.size], _CRC.unpack(raw[_BODY.size:])
    magic, version, flags, payload_len, payload_crc, seed, nonce_offset, nonce_len = \
        _BODY.unpack(body)
    if magic != FOOTER_MAGIC or version != FOOTER_VERSION:
        raise FooterNotFound("no stash footer at end of image")
    if crc32(body) != stored_crc:
        raise FooterNotFound("stash footer checksum mismatch")

    obfuscated = bool(flags & FLAG_OBFUSCATED)
    data_end = size - FOOTER_SIZE
    if payload_len > data_end:
        raise FooterNotFound(f"footer payload length {payload_len} exceeds image")
    return StashManifest(
        image_size=size,
        payload_offset=data_end - payload_len,
        payload_len=payload_len,
        payload_crc32=payload_crc,
        obfuscated=obfuscated,
        seed=seed if obfuscated else None,
        nonce_offset=nonce_offset,
        nonce_len=nonce_len,
        created_unix=0,
    )
