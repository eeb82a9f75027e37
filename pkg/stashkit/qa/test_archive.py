"""newc archive writer/reader and directory adapters."""
import gzip
import io
import os
import random
import shutil
import subprocess

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stashkit.archive import extract_tree, list_entries, merge_entries, pack, pack_tree, unpack
from stashkit.archive.newc import HEADER_SIZE, gzip_wrap
from stashkit.errors import (
    BadMagic,
    DuplicateName,
    HeaderFieldNotHex,
    InvalidName,
    MissingTrailer,
    TruncatedStream,
)
from stashkit.qa.fixtures import random_entries, subsystem_entries, write_tree
from stashkit.qa.oracles import gnu_style_newc
from stashkit.schemas import ArchiveEntry, ListedEntry


def test_empty_archive_is_a_bare_trailer():
    data = pack([])
    assert len(data) == 124
    assert data.startswith(b"070701")
    assert data[HEADER_SIZE:HEADER_SIZE + 11] == b"TRAILER!!!\x00"
    assert unpack(data) == []


def test_header_field_layout():
    data = pack([ArchiveEntry.file("hello", b"abc", perm=0o640, mtime=0x5F5E100)])
    assert data[6:14] == b"00000001"       # ino
    assert data[14:22] == b"000081a0"      # mode 0100640
    assert data[38:46] == b"00000001"      # nlink
    assert data[46:54] == b"05f5e100"      # mtime
    assert data[54:62] == b"00000003"      # filesize
    assert data[94:102] == b"00000006"     # namesize incl. NUL
    # 110 + 6 = 116 is aligned, body follows directly, then one pad byte
    assert data[116:120] == b"abc\x00"


def test_round_trip_random_trees():
    rnd = random.Random(7)
    for _ in range(200):
        entries = random_entries(rnd, max_files=100, max_total=1 << 20)
        for compress in (False, True):
            assert unpack(pack(entries, compress=compress)) == entries


def test_gzip_output_is_deterministic():
    entries = subsystem_entries()
    first = pack(entries, compress=True)
    assert first == pack(entries, compress=True)
    assert first[:4] == b"\x1f\x8b\x08\x00"
    assert first[4:8] == b"\x00\x00\x00\x00"
    assert first[9] == 0xFF
    assert gzip.decompress(first) == pack(entries)


def test_gzip_extra_flags_follow_level():
    assert gzip_wrap(b"x", 9)[8] == 2
    assert gzip_wrap(b"x", 1)[8] == 4
    assert gzip_wrap(b"x", 6)[8] == 0
    with pytest.raises(ValueError):
        pack([], compress=True, gzip_level=10)


def test_duplicate_and_invalid_names():
    with pytest.raises(DuplicateName):
        pack([ArchiveEntry.file("a", b""), ArchiveEntry.file("a", b"x")])
    with pytest.raises(InvalidName):
        pack([ArchiveEntry.file("/etc/passwd", b"")])
    with pytest.raises(InvalidName):
        pack([ArchiveEntry.file("TRAILER!!!", b"")])
    with pytest.raises(InvalidName):
        pack([ArchiveEntry.file("bin/sh", b"")])  # parent missing


def test_bad_magic():
    data = bytearray(pack([ArchiveEntry.file("a", b"1")]))
    data[5:6] = b"7"
    with pytest.raises(BadMagic):
        unpack(bytes(data))
    with pytest.raises(BadMagic):
        unpack(b"PK\x03\x04" + bytes(200))


def test_truncation_is_detected_everywhere():
    data = pack(subsystem_entries())
    trailer_start = len(data) - 124
    with pytest.raises(MissingTrailer):
        unpack(data[:trailer_start])
    for cut in (1, 50, HEADER_SIZE + 2, trailer_start - 1, len(data) - 3):
        with pytest.raises((TruncatedStream, MissingTrailer)):
            unpack(data[:cut])


def test_truncated_gzip_stream():
    data = pack(subsystem_entries(), compress=True)
    with pytest.raises(TruncatedStream):
        unpack(data[: len(data) // 2])


def test_non_hex_header_field():
    data = bytearray(pack([ArchiveEntry.file("a", b"1")]))
    data[54:62] = b"0000000g"
    with pytest.raises(HeaderFieldNotHex):
        unpack(bytes(data))


def test_gnu_style_fixture_unpacks():
    fixture = gnu_style_newc([
        ("etc", 0o040755, b""),
        ("etc/hostname", 0o100644, b"handset\n"),
        ("init", 0o100755, b"#!/bin/sh\n"),
    ])
    assert len(fixture) % 512 == 0
    entries = unpack(fixture)
    assert [e.name for e in entries] == ["etc", "etc/hostname", "init"]
    assert entries[0].is_dir
    assert entries[1].body == b"handset\n"
    assert entries[2].mode == 0o100755
    assert all(e.mtime == 1700000000 for e in entries)


def test_list_entries_skips_bodies():
    data = pack(subsystem_entries())
    listed = list_entries(io.BytesIO(data))
    init = subsystem_entries()[0]
    assert listed[0] == ListedEntry(name="init", size=len(init.body), mode=0o100755)
    assert [e.name for e in listed] == [e.name for e in subsystem_entries()]
    assert list_entries(pack(subsystem_entries(), compress=True)) == listed


def test_list_entries_agrees_with_unpack():
    rnd = random.Random(11)
    for _ in range(50):
        entries = random_entries(rnd, max_files=40, max_total=256 << 10)
        data = pack(entries, compress=rnd.random() < 0.5)
        assert list_entries(io.BytesIO(data)) == [
            ListedEntry(name=e.name, size=len(e.body), mode=e.mode) for e in unpack(data)
        ]


def _align4(n: int) -> int:
    return (n + 3) & ~3


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_headers_and_bodies_are_4_aligned(seed):
    data = pack(random_entries(random.Random(seed), max_files=25, max_total=64 << 10))
    offset = 0
    while True:
        assert offset % 4 == 0
        assert data[offset:offset + 6] == b"070701"
        filesize = int(data[offset + 54:offset + 62], 16)
        namesize = int(data[offset + 94:offset + 102], 16)
        name = data[offset + HEADER_SIZE:offset + HEADER_SIZE + namesize - 1]
        body = offset + _align4(HEADER_SIZE + namesize)
        assert body % 4 == 0
        assert set(data[offset + HEADER_SIZE + namesize - 1:body]) == {0}
        if name == b"TRAILER!!!":
            assert body == len(data)
            break
        offset = body + _align4(filesize)


def test_pack_tree_extract_tree(tmp_path):
    src = write_tree(str(tmp_path / "src"), {
        "init": b"#!/bin/sh\n",
        "bin/busybox": b"\x7fELF" + bytes(100),
        "etc/conf/a.txt": b"a",
    })
    entries = pack_tree(src, mtime=1234)
    assert [e.name for e in entries] == ["init", "bin", "bin/busybox", "etc", "etc/conf",
                                         "etc/conf/a.txt"]
    assert all(e.mtime == 1234 for e in entries)

    dest = tmp_path / "dest"
    extract_tree(unpack(pack(entries, compress=True)), str(dest))
    assert (dest / "bin" / "busybox").read_bytes() == b"\x7fELF" + bytes(100)
    assert os.stat(dest / "init").st_mtime == 1234


def test_extract_tree_refuses_escape(tmp_path):
    with pytest.raises(InvalidName):
        extract_tree([ArchiveEntry.file("../outside", b"x")], str(tmp_path / "dest"))
    assert not (tmp_path / "outside").exists()


def test_extract_tree_refuses_duplicate_names(tmp_path):
    entries = [ArchiveEntry.file("a", b"first"), ArchiveEntry.file("a", b"second")]
    # unpack keeps repeated members; only extraction rejects them
    archive = gnu_style_newc([(e.name, e.mode, e.body) for e in entries])
    assert [(e.name, e.body) for e in unpack(archive)] == [("a", b"first"), ("a", b"second")]
    with pytest.raises(DuplicateName):
        extract_tree(entries, str(tmp_path / "dest"))
    assert (tmp_path / "dest" / "a").read_bytes() == b"first"


def test_merge_entries_replaces_and_synthesizes_parents():
    base = subsystem_entries()
    merged = merge_entries(base, [
        ArchiveEntry.file("etc/stash.conf", b"mode=loud\n"),
        ArchiveEntry.file("var/log/last", b"0"),
    ])
    names = [e.name for e in merged]
    assert names == ["init", "bin", "bin/sh", "etc", "etc/stash.conf", "var", "var/log",
                     "var/log/last"]
    assert merged[4].body == b"mode=loud\n"
    assert merged[5].is_dir
    pack(merged)  # still parents-first


@pytest.mark.skipif(shutil.which("cpio") is None, reason="cpio not installed")
def test_reference_cpio_interoperates(tmp_path):
    entries = subsystem_entries()
    out = tmp_path / "ours"
    out.mkdir()
    subprocess.run(["cpio", "-idm", "--quiet"], input=pack(entries), cwd=out, check=True)
    assert (out / "bin" / "sh").read_bytes() == entries[2].body
    assert (out / "init").read_bytes() == entries[0].body

    names = "\n".join(e.name for e in entries) + "\n"
    theirs = subprocess.run(["cpio", "-o", "-H", "newc", "--quiet"], input=names.encode(),
                            cwd=out, check=True, capture_output=True).stdout
    parsed = {e.name: e for e in unpack(theirs)}
    for entry in entries:
        assert parsed[entry.name].body == entry.body
        assert parsed[entry.name].is_dir == entry.is_dir
