"""I/O utilities: image stores, key = value documents, output files."""
import mmap
import os
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterator, List, Tuple, Union

ImageStore = Union[bytearray, mmap.mmap]


def ensure_dir(path: str) -> str:
    """Ensure directory exists, create if needed.

    Args:
        path: Directory path

    Returns:
        Absolute path to directory
    """
    Path(path).mkdir(parents=True, exist_ok=True)
    return str(Path(path).absolute())


@contextmanager
def open_image(path: str, writable: bool = False) -> Iterator[mmap.mmap]:
    """Map a user-data image file as a random-access byte store.

    Args:
        path: Image file
        writable: Map read/write (changes land in the file on close)

    Yields:
        Memory map supporting ``len``, slicing and slice assignment
    """
    flags = "r+b" if writable else "rb"
    access = mmap.ACCESS_WRITE if writable else mmap.ACCESS_READ
    with open(path, flags) as f:
        mm = mmap.mmap(f.fileno(), 0, access=access)
        try:
            yield mm
        finally:
            if writable:
                mm.flush()
            mm.close()


def create_image(path: str, size: int) -> str:
    """Create a zero-filled image file of ``size`` bytes (sparse where supported)."""
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    with open(path, "wb") as f:
        f.truncate(size)
    return path


def write_bytes(path: str, data: bytes) -> str:
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    with open(path, "wb") as f:
        f.write(data)
    return path


def read_bytes(path: str) -> bytes:
    with open(path, "rb") as f:
        return f.read()


def dump_kv(pairs: List[Tuple[str, str]]) -> str:
    """Render ``key = value`` lines, one per pair, in the given order."""
    return "".join(f"{key} = {value}\n" for key, value in pairs)


def parse_kv(text: str) -> Dict[str, str]:
    """Parse ``key = value`` lines.

    Blank lines and ``#`` comments are skipped; the last occurrence of a key wins.

    Raises:
        ValueError: A non-blank line lacks ``=``
    """
    result: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        result[key.strip()] = value.strip()
    return result
