"""SVR4 newc archives, optionally gzip-wrapped."""
from stashkit.archive.newc import list_entries, pack, unpack
from stashkit.archive.tree import extract_tree, merge_entries, pack_tree

__all__ = ["pack", "unpack", "list_entries", "pack_tree", "extract_tree", "merge_entries"]
