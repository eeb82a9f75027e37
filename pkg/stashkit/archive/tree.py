"""Directory adapters: build entry lists from a tree and materialize them back."""
import os
import stat
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from loguru import logger

from stashkit.errors import DuplicateName, InvalidName
from stashkit.schemas import S_IFDIR, S_IFREG, ArchiveEntry


def pack_tree(root: str, mtime: Optional[int] = None) -> List[ArchiveEntry]:
    """Walk ``root`` into a parents-first entry list.

    Args:
        root: Directory whose contents become the archive (root itself is not an entry)
        mtime: Fixed mtime for every entry; file mtimes are used when None

    Returns:
        Entries sorted by path, directories before their children
    """
    base = Path(root)
    if not base.is_dir():
        raise NotADirectoryError(f"not a directory: {root}")

    entries: List[ArchiveEntry] = []
    for dirpath, dirnames, filenames in os.walk(base):
        dirnames.sort()
        filenames.sort()
        rel_dir = Path(dirpath).relative_to(base)

        if rel_dir != Path("."):
            st = os.stat(dirpath)
            entries.append(ArchiveEntry(
                name=rel_dir.as_posix(),
                mode=S_IFDIR | stat.S_IMODE(st.st_mode),
                mtime=int(st.st_mtime) if mtime is None else mtime,
            ))

        for fn in filenames:
            path = Path(dirpath) / fn
            st = os.lstat(path)
            if not stat.S_ISREG(st.st_mode):
                logger.warning("skipping {}: not a regular file", path)
                continue
            entries.append(ArchiveEntry(
                name=(rel_dir / fn).as_posix() if rel_dir != Path(".") else fn,
                mode=S_IFREG | stat.S_IMODE(st.st_mode),
                mtime=int(st.st_mtime) if mtime is None else mtime,
                body=path.read_bytes(),
            ))
    return entries


def _safe_target(dest: Path, name: str) -> Path:
    target = (dest / name).resolve()
    if target != dest and dest not in target.parents:
        raise InvalidName(f"entry {name!r} resolves outside {dest}", name=name)
    return target


def extract_tree(entries: Sequence[ArchiveEntry], dest: str) -> List[str]:
    """Materialize entries under ``dest``.

    Args:
        entries: Archive members
        dest: Destination directory (created if missing)

    Returns:
        Written paths in entry order

    Raises:
        InvalidName: An entry would land outside ``dest``
        DuplicateName: A name occurs twice
    """
    root = Path(dest)
    root.mkdir(parents=True, exist_ok=True)
    root = root.resolve()

    written: List[str] = []
    dir_times = []
    seen: set = set()
    for entry in entries:
        if entry.name in seen:
            raise DuplicateName(f"duplicate entry name {entry.name!r}", name=entry.name)
        seen.add(entry.name)
        target = _safe_target(root, entry.name)
        if entry.is_dir:
            target.mkdir(parents=True, exist_ok=True)
            dir_times.append((target, entry))
        else:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(entry.body)
            os.chmod(target, stat.S_IMODE(entry.mode))
            os.utime(target, (entry.mtime, entry.mtime))
        written.append(str(target))

    # Children touch their parent's mtime, so directories are finalized last
    for target, entry in reversed(dir_times):
        os.chmod(target, stat.S_IMODE(entry.mode) | stat.S_IRWXU)
        os.utime(target, (entry.mtime, entry.mtime))
    return written


def merge_entries(base: Sequence[ArchiveEntry],
                  overlay: Sequence[ArchiveEntry]) -> List[ArchiveEntry]:
    """Insert or replace entries by name, keeping parents-first order.

    Replacements keep their original position; new names are appended after any
    synthesized parent directories (mode 040755).

    Args:
        base: Existing archive entries
        overlay: Entries to add or replace

    Returns:
        Merged entry list
    """
    merged: Dict[str, ArchiveEntry] = {e.name: e for e in base}
    for entry in overlay:
        if entry.name not in merged:
            parts = entry.name.split("/")
            for depth in range(1, len(parts)):
                parent = "/".join(parts[:depth])
                if parent not in merged:
                    merged[parent] = ArchiveEntry.directory(parent, mtime=entry.mtime)
        merged[entry.name] = entry
    return list(merged.values())
