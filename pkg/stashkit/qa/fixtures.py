"""Synthetic inputs with known ground truth: trees, payloads, images, event streams."""
import os
import random
from typing import Dict, List, Sequence, Tuple

from stashkit.archive import pack
from stashkit.schemas import (
    ABS_MT_POSITION_X,
    EV_ABS,
    EV_SYN,
    ArchiveEntry,
    InputEvent,
)

MAGICS = {
    "gzip": b"\x1f\x8b\x08\x00",
    "png": b"\x89PNG\r\n\x1a\n",
    "elf": b"\x7fELF\x02\x01\x01\x00",
}


def random_entries(rnd: random.Random, max_files: int = 100,
                   max_total: int = 1 << 20) -> List[ArchiveEntry]:
    """Random parents-first tree with at most ``max_files`` files and ``max_total`` body bytes."""
    entries: List[ArchiveEntry] = []
    dirs = [""]
    budget = max_total
    for i in range(rnd.randint(0, max_files)):
        if rnd.random() < 0.2:
            parent = rnd.choice(dirs)
            name = f"{parent}/d{i}" if parent else f"d{i}"
            entries.append(ArchiveEntry.directory(name, perm=rnd.choice([0o755, 0o700]),
                                                  mtime=rnd.randint(0, 2**32 - 1)))
            dirs.append(name)
        parent = rnd.choice(dirs)
        size = min(budget, rnd.choice([0, 1, 3, 4, 5, 511, 512, 4096, rnd.randint(0, 20000)]))
        budget -= size
        name = f"{parent}/f{i}.bin" if parent else f"f{i}.bin"
        entries.append(ArchiveEntry.file(name, rnd.randbytes(size),
                                         perm=rnd.choice([0o644, 0o600, 0o755]),
                                         mtime=rnd.randint(0, 2**32 - 1)))
    return entries


def subsystem_entries(extra: bytes = b"") -> List[ArchiveEntry]:
    """Small chroot tree: /init, /bin/sh and a config file."""
    return [
        ArchiveEntry.file("init", b"#!/bin/sh\nexec /bin/sh\n", perm=0o755),
        ArchiveEntry.directory("bin"),
        ArchiveEntry.file("bin/sh", b"\x7fELF" + bytes(60), perm=0o755),
        ArchiveEntry.directory("etc"),
        ArchiveEntry.file("etc/stash.conf", b"mode=covert\n" + extra),
    ]


def magic_payload() -> bytes:
    """Uncompressed archive whose bodies start with gzip, PNG and ELF headers."""
    entries = [ArchiveEntry.file(f"{name}.bin", magic + bytes(32))
               for name, magic in MAGICS.items()]
    return pack(entries, compress=False)


def write_tree(root: str, files: Dict[str, bytes]) -> str:
    """Create ``files`` (relative path -> content) under ``root``."""
    for rel, body in files.items():
        path = os.path.join(root, rel)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "wb") as f:
            f.write(body)
    return root


def touch_events(points: Sequence[Tuple[int, int]], code: int = ABS_MT_POSITION_X,
                 base_sec: int = 1_700_000_000) -> List[InputEvent]:
    """One EV_SYN-terminated frame per ``(offset_ms, value)`` sample."""
    events = []
    for offset_ms, value in points:
        sec = base_sec + offset_ms // 1000
        usec = (offset_ms % 1000) * 1000
        events.append(InputEvent(tv_sec=sec, tv_usec=usec, etype=EV_ABS, code=code, value=value))
        events.append(InputEvent(tv_sec=sec, tv_usec=usec, etype=EV_SYN))
    return events


def random_event_stream(rnd: random.Random, length: int,
                        codes: Sequence[int] = (ABS_MT_POSITION_X, 0x36)) -> List[InputEvent]:
    """Time-ordered stream of axis events and EV_SYN markers with jittery values."""
    events = []
    t_ms = rnd.randint(0, 10_000)
    value = rnd.randint(0, 1500)
    for _ in range(length):
        t_ms += rnd.choice([0, 0, 5, 10, 17, 40, 150, 600])
        roll = rnd.random()
        sec, usec = 1_700_000_000 + t_ms // 1000, (t_ms % 1000) * 1000
        if roll < 0.3:
            events.append(InputEvent(tv_sec=sec, tv_usec=usec, etype=EV_SYN))
        else:
            value = max(0, value + rnd.randint(-90, 90))
            events.append(InputEvent(tv_sec=sec, tv_usec=usec, etype=EV_ABS,
                                     code=rnd.choice(list(codes)), value=value))
    return events
