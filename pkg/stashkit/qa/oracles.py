"""Reference implementations the test suite checks production code against.

Each oracle is written from the format or behaviour description alone, in the
most literal form available, and shares no code with the package.
"""
from typing import Dict, List, Optional, Sequence, Tuple

# CRC-32 (IEEE 802.3, reflected)

def crc32_bitwise(data: bytes) -> int:
    crc = 0xFFFFFFFF
    for byte in data:
        crc ^= byte
        for _ in range(8):
            if crc & 1:
                crc = (crc >> 1) ^ 0xEDB88320
            else:
                crc >>= 1
    return crc ^ 0xFFFFFFFF


# xorshift64*

class XorShift64Star:
    """Textbook xorshift64* generator (shifts 12/25/27)."""

    def __init__(self, seed: int):
        self.state = seed % (1 << 64)

    def next(self) -> int:
        x = self.state
        x = x ^ (x >> 12)
        x = (x ^ (x << 25)) % (1 << 64)
        x = x ^ (x >> 27)
        self.state = x
        return (x * 2685821657736338717) % (1 << 64)


def xorshift_bytes(seed: int, length: int) -> bytes:
    gen = XorShift64Star(seed)
    out = bytearray()
    while len(out) < length:
        out += gen.next().to_bytes(8, "little")
    return bytes(out[:length])


# Swipe detection, brute force

def _axis_samples(events: Sequence, axis_code: int,
                  fallback: Optional[int]) -> List[Tuple[int, int, int]]:
    has_primary = any(e.etype == 3 and e.code == axis_code for e in events)
    axis = axis_code if has_primary or fallback is None else fallback
    samples = []
    frame = 0
    for e in events:
        if e.etype == 0:
            frame += 1
        elif e.etype == 3 and e.code == axis:
            samples.append((e.tv_sec * 1000 + e.tv_usec // 1000, e.value, frame))
    return samples


def swipe_oracle(events: Sequence, axis_code: int, fallback: Optional[int], threshold: int,
                 window_ms: int) -> List[Tuple[int, int, int]]:
    """(start_ms, end_ms, displacement) for every swipe, via the full pair matrix."""
    samples = _axis_samples(events, axis_code, fallback)
    n = len(samples)
    in_window = [[samples[j][0] - samples[i][0] <= window_ms for j in range(n)] for i in range(n)]
    qualifies = [
        [j > i and in_window[i][j] and abs(samples[j][1] - samples[i][1]) >= threshold
         for j in range(n)]
        for i in range(n)
    ]

    found = []
    i = 0
    while i < n:
        partners = [j for j in range(n) if qualifies[i][j]]
        if not partners:
            i += 1
            continue
        j = partners[-1]
        found.append((samples[i][0], samples[j][0], samples[j][1] - samples[i][1]))
        last = max(k for k in range(i, n) if in_window[i][k])
        boundary = samples[last][2]
        while i < n and samples[i][2] <= boundary:
            i += 1
    return found


# Tunnel lifecycle, written out state by state

TRANSITION_ORACLE: Dict[str, Dict[str, str]] = {
    "Down": {
        "up_cmd": "IfaceUp",
        "fail": "Error",
    },
    "IfaceUp": {
        "iface_ok": "IfaceUp",
        "tunnel_ok": "TunnelUp",
        "fail": "Error",
    },
    "TunnelUp": {
        "data": "Active",
        "down_cmd": "Down",
        "fail": "Error",
    },
    "Active": {
        "data": "Active",
        "down_cmd": "Down",
        "fail": "Error",
    },
    "Error": {
        "down_cmd": "Down",
        "fail": "Error",
    },
}


# newc archives in the style of GNU cpio / gen_init_cpio

def _hdr(ino: int, mode: int, nlink: int, mtime: int, size: int, name: bytes) -> bytes:
    fields = [ino, mode, 0, 0, nlink, mtime, size, 8, 1, 0, 0, len(name) + 1, 0]
    # GNU tools write upper-case hex
    return b"070701" + b"".join(b"%08X" % f for f in fields)


def gnu_style_newc(members: Sequence[Tuple[str, int, bytes]], mtime: int = 1700000000) -> bytes:
    """Assemble an archive by hand: real-looking inode numbers, nlink 2 on
    directories, a device number, upper-case hex and 512-byte block padding."""
    out = bytearray()

    def put(ino: int, mode: int, nlink: int, name: str, body: bytes) -> None:
        raw_name = name.encode()
        out.extend(_hdr(ino, mode, nlink, mtime, len(body), raw_name))
        out.extend(raw_name + b"\x00")
        while len(out) % 4:
            out.append(0)
        out.extend(body)
        while len(out) % 4:
            out.append(0)

    for index, (name, mode, body) in enumerate(members):
        nlink = 2 if mode & 0o170000 == 0o040000 else 1
        put(131072 + 7 * index, mode, nlink, name, body)
    put(0, 0, 1, "TRAILER!!!", b"")
    while len(out) % 512:
        out.append(0)
    return bytes(out)
