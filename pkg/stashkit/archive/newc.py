"""SVR4 "newc" cpio reader/writer with deterministic gzip wrapping.

Header layout (ASCII hex, 8 chars per field after the 6-byte magic)::

    magic ino mode uid gid nlink mtime filesize devmajor devminor
    rdevmajor rdevminor namesize check

110 bytes in total. The NUL-terminated name and the body are each padded to a
4-byte boundary; the archive ends with a ``TRAILER!!!`` record.
"""
import gzip
import io
import re
import struct
import zlib
from typing import BinaryIO, Iterator, List, Optional, Sequence, Tuple, Union

from loguru import logger

from stashkit.errors import (
    BadMagic,
    BodyTooLarge,
    DuplicateName,
    HeaderFieldNotHex,
    InvalidName,
    MissingTrailer,
    TruncatedStream,
)
from stashkit.observability.metrics import timed
from stashkit.schemas import S_IFDIR, S_IFMT, S_IFREG, U32_MAX, ArchiveEntry, ListedEntry

MAGIC = b"070701"
GZIP_MAGIC = b"\x1f\x8b"
HEADER_SIZE = 110
TRAILER = "TRAILER!!!"
DEFAULT_GZIP_LEVEL = 6

_HEX8 = re.compile(rb"[0-9A-Fa-f]{8}")
_FIELDS = (
    "ino", "mode", "uid", "gid", "nlink", "mtime", "filesize",
    "devmajor", "devminor", "rdevmajor", "rdevminor", "namesize", "check",
)
_SKIP_CHUNK = 1 << 20

Source = Union[bytes, bytearray, memoryview, BinaryIO]


def pad4(n: int) -> int:
    return (4 - (n & 3)) & 3


def _encode_name(name: str) -> bytes:
    return name.encode("utf-8", "surrogateescape")


def _decode_name(raw: bytes) -> str:
    return raw.decode("utf-8", "surrogateescape")


def _header(ino: int, mode: int, uid: int, gid: int, mtime: int, filesize: int,
            namesize: int) -> bytes:
    fields = (ino, mode, uid, gid, 1, mtime, filesize, 0, 0, 0, 0, namesize, 0)
    return MAGIC + b"".join(b"%08x" % v for v in fields)


def _record(ino: int, entry_name: bytes, mode: int, uid: int, gid: int, mtime: int,
            body: bytes) -> bytes:
    namesize = len(entry_name) + 1
    head = _header(ino, mode, uid, gid, mtime, len(body), namesize)
    return b"".join((
        head,
        entry_name,
        b"\x00" * (1 + pad4(HEADER_SIZE + namesize)),
        body,
        b"\x00" * pad4(len(body)),
    ))


def _validate(entries: Sequence[ArchiveEntry]) -> None:
    seen: set = set()
    dirs: set = set()
    for entry in entries:
        name = entry.name
        if not name or "\x00" in name or name == TRAILER:
            raise InvalidName(f"invalid entry name {name!r}", name=name)
        if name.startswith("/"):
            raise InvalidName(f"entry name must be relative: {name!r}", name=name)
        if name in seen:
            raise DuplicateName(f"duplicate entry name {name!r}", name=name)
        filetype = entry.mode & S_IFMT
        if filetype not in (S_IFREG, S_IFDIR):
            raise InvalidName(f"{name!r}: only regular files and directories are supported",
                              name=name)
        if entry.is_dir and entry.body:
            raise InvalidName(f"{name!r}: directory entries carry no body", name=name)
        if len(entry.body) > U32_MAX:
            raise BodyTooLarge(f"{name!r}: body of {len(entry.body)} bytes exceeds newc limit",
                               name=name)
        parts = name.split("/")
        for depth in range(1, len(parts)):
            parent = "/".join(parts[:depth])
            if parent not in dirs:
                raise InvalidName(f"{name!r}: parent directory {parent!r} must precede it",
                                  name=name)
        seen.add(name)
        if entry.is_dir:
            dirs.add(name)


def gzip_wrap(data: bytes, level: int = DEFAULT_GZIP_LEVEL) -> bytes:
    """Single deterministic gzip member: mtime 0, no name/comment, OS byte 0xFF.

    Args:
        data: Uncompressed bytes
        level: Deflate level 0-9

    Returns:
        RFC 1952 member
    """
    xfl = 2 if level == 9 else 4 if level == 1 else 0
    header = struct.pack("<2sBBIBB", GZIP_MAGIC, 8, 0, 0, xfl, 0xFF)
    deflater = zlib.compressobj(level, zlib.DEFLATED, -zlib.MAX_WBITS)
    body = deflater.compress(data) + deflater.flush()
    trailer = struct.pack("<II", zlib.crc32(data) & U32_MAX, len(data) & U32_MAX)
    return header + body + trailer


@timed("pack")
def pack(entries: Sequence[ArchiveEntry], compress: bool = False,
         gzip_level: int = DEFAULT_GZIP_LEVEL) -> bytes:
    """Serialize entries as a newc archive.

    Args:
        entries: Parents-first, uniquely named members
        compress: Wrap the archive in one gzip member
        gzip_level: Deflate level 0-9

    Returns:
        Archive bytes

    Raises:
        DuplicateName, InvalidName, BodyTooLarge
    """
    if not 0 <= gzip_level <= 9:
        raise ValueError(f"gzip_level must be in 0..9, got {gzip_level}")
    _validate(entries)

    chunks: List[bytes] = []
    for ino, entry in enumerate(entries, start=1):
        chunks.append(_record(ino, _encode_name(entry.name), entry.mode, entry.uid,
                              entry.gid, entry.mtime, entry.body))
    chunks.append(_record(0, TRAILER.encode("ascii"), 0, 0, 0, 0, b""))
    raw = b"".join(chunks)

    logger.debug("packed {} entries into {} bytes (compress={})", len(entries), len(raw),
                 compress)
    return gzip_wrap(raw, gzip_level) if compress else raw


class _Reader:
    """Sequential reader that tracks the archive offset."""

    def __init__(self, fh: BinaryIO):
        self.fh = fh
        self.offset = 0

    def read(self, n: int) -> bytes:
        try:
            data = self.fh.read(n)
        except EOFError as e:
            raise TruncatedStream(f"gzip stream ended early: {e}") from e
        except (OSError, zlib.error) as e:
            raise TruncatedStream(f"corrupt gzip stream: {e}") from e
        self.offset += len(data)
        return data

    def read_exact(self, n: int, what: str) -> bytes:
        data = self.read(n)
        if len(data) != n:
            raise TruncatedStream(f"truncated {what} at offset {self.offset}",
                                  offset=self.offset)
        return data

    def skip(self, n: int, what: str) -> None:
        while n > 0:
            step = min(n, _SKIP_CHUNK)
            self.read_exact(step, what)
            n -= step


def _open(source: Source) -> BinaryIO:
    if isinstance(source, (bytes, bytearray, memoryview)):
        fh: BinaryIO = io.BytesIO(bytes(source))
    else:
        fh = source
    head = fh.read(2)
    fh.seek(-len(head), io.SEEK_CUR)
    if head == GZIP_MAGIC:
        return gzip.GzipFile(fileobj=fh, mode="rb")  # type: ignore[return-value]
    return fh


def _parse_header(raw: bytes, offset: int) -> dict:
    magic = raw[:6]
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r} at offset {offset}", offset=offset)
    values = {}
    for i, name in enumerate(_FIELDS):
        field = raw[6 + 8 * i:14 + 8 * i]
        if not _HEX8.fullmatch(field):
            raise HeaderFieldNotHex(f"{name} field {field!r} at offset {offset} is not hex",
                                    offset=offset, field=name)
        values[name] = int(field, 16)
    return values


def _iter_members(source: Source, with_bodies: bool) -> Iterator[Tuple[dict, str, Optional[bytes]]]:
    reader = _Reader(_open(source))
    while True:
        start = reader.offset
        raw = reader.read(HEADER_SIZE)
        if not raw:
            raise MissingTrailer(f"archive ended at offset {start} without {TRAILER}")
        if not MAGIC.startswith(raw[:6]):
            raise BadMagic(f"bad magic {raw[:6]!r} at offset {start}", offset=start)
        if len(raw) != HEADER_SIZE:
            raise TruncatedStream(f"truncated header at offset {start}", offset=start)
        hdr = _parse_header(raw, start)

        namesize = hdr["namesize"]
        if namesize == 0:
            raise TruncatedStream(f"zero namesize at offset {start}", offset=start)
        name_raw = reader.read_exact(namesize, "name")
        reader.skip(pad4(HEADER_SIZE + namesize), "name padding")
        name = _decode_name(name_raw[:-1] if name_raw.endswith(b"\x00") else name_raw)
        if name == TRAILER:
            return

        size = hdr["filesize"]
        body: Optional[bytes] = None
        if with_bodies:
            body = reader.read_exact(size, "body")
        else:
            reader.skip(size, "body")
        reader.skip(pad4(size), "body padding")
        yield hdr, name, body


@timed("unpack")
def unpack(stream: Source) -> List[ArchiveEntry]:
    """Parse a newc archive (gzip-wrapped input is detected by its 1F 8B prefix).

    Args:
        stream: Archive bytes or a seekable binary file

    Returns:
        Entries in archive order, trailer excluded

    Raises:
        BadMagic, TruncatedStream, HeaderFieldNotHex, MissingTrailer
    """
    entries = [
        ArchiveEntry(name=name, mode=hdr["mode"], uid=hdr["uid"], gid=hdr["gid"],
                     mtime=hdr["mtime"], body=body or b"")
        for hdr, name, body in _iter_members(stream, with_bodies=True)
    ]
    logger.debug("unpacked {} entries", len(entries))
    return entries


def list_entries(stream: Source) -> List[ListedEntry]:
    """Metadata of every member without materializing bodies.

    Bodies are skipped in bounded chunks, so file-backed archives larger than
    memory can be listed.

    Args:
        stream: Archive bytes or a seekable binary file

    Returns:
        (name, size, mode) records in archive order
    """
    return [
        ListedEntry(name=name, size=hdr["filesize"], mode=hdr["mode"])
        for hdr, name, _ in _iter_members(stream, with_bodies=False)
    ]
