"""Tail-of-image payload stash."""
from stashkit.stash.carve import DEFAULT_SIGNATURES, clean_fill, scan, scrub_region
from stashkit.stash.embed import (
    check_capacity,
    check_manifest,
    embed,
    extract,
    pick_seed,
    scramble,
    update,
)
from stashkit.stash.footer import FOOTER_SIZE, locate
from stashkit.stash.keystream import keystream, obfuscate
from stashkit.stash.manifest import load_manifest, manifest_from_text, manifest_to_text, save_manifest

__all__ = [
    "DEFAULT_SIGNATURES",
    "FOOTER_SIZE",
    "check_capacity",
    "check_manifest",
    "clean_fill",
    "embed",
    "extract",
    "keystream",
    "load_manifest",
    "locate",
    "manifest_from_text",
    "manifest_to_text",
    "obfuscate",
    "pick_seed",
    "save_manifest",
    "scan",
    "scramble",
    "scrub_region",
    "update",
]
