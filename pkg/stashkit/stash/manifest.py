"""Manifest persistence: ``key = value`` lines, keys are the manifest field names."""
from typing import Dict, List, Tuple

from pydantic import ValidationError

from stashkit.errors import ManifestFormatError
from stashkit.schemas import StashManifest
from stashkit.utils.io import dump_kv, parse_kv

FIELD_ORDER = (
    "image_size",
    "payload_offset",
    "payload_len",
    "payload_crc32",
    "obfuscated",
    "seed",
    "nonce_offset",
    "nonce_len",
    "created_unix",
)


def manifest_to_text(manifest: StashManifest) -> str:
    pairs: List[Tuple[str, str]] = []
    for key in FIELD_ORDER:
        value = getattr(manifest, key)
        if key == "seed":
            if value is None:
                continue
            rendered = f"0x{value:016x}"
        elif key == "payload_crc32":
            rendered = f"0x{value:08x}"
        elif isinstance(value, bool):
            rendered = "true" if value else "false"
        else:
            rendered = str(value)
        pairs.append((key, rendered))
    return dump_kv(pairs)


def _coerce(key: str, value: str) -> object:
    if key == "obfuscated":
        if value not in ("true", "false"):
            raise ManifestFormatError(f"obfuscated must be true or false, got {value!r}")
        return value == "true"
    try:
        return int(value, 0)
    except ValueError as e:
        raise ManifestFormatError(f"{key}: {value!r} is not an integer") from e


def manifest_from_text(text: str) -> StashManifest:
    """Parse manifest text.

    Raises:
        ManifestFormatError: Unknown keys, bad values or violated field rules
    """
    try:
        raw = parse_kv(text)
    except ValueError as e:
        raise ManifestFormatError(str(e)) from e

    unknown = set(raw) - set(FIELD_ORDER)
    if unknown:
        raise ManifestFormatError(f"unknown manifest keys: {sorted(unknown)}")
    fields: Dict[str, object] = {key: _coerce(key, value) for key, value in raw.items()}
    try:
        return StashManifest.model_validate(fields)
    except ValidationError as e:
        raise ManifestFormatError(f"invalid manifest: {e.errors()[0]['msg']}") from e


def save_manifest(manifest: StashManifest, path: str) -> str:
    with open(path, "w", encoding="utf-8") as f:
        f.write(manifest_to_text(manifest))
    return path


def load_manifest(path: str) -> StashManifest:
    with open(path, "r", encoding="utf-8") as f:
        return manifest_from_text(f.read())
