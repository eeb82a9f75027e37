"""CRC32 and xorshift64* keystream against independent oracles."""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stashkit.errors import ZeroSeed
from stashkit.qa.oracles import crc32_bitwise, xorshift_bytes
from stashkit.stash import keystream, obfuscate
from stashkit.utils.hashing import crc32


def test_crc32_check_value():
    assert crc32(b"123456789") == 0xCBF43926
    assert crc32_bitwise(b"123456789") == 0xCBF43926
    assert crc32(b"") == 0


@given(st.binary(max_size=2048))
@settings(max_examples=200)
def test_crc32_matches_bitwise_oracle(data):
    assert crc32(data) == crc32_bitwise(data)


def test_crc32_is_incremental():
    assert crc32(b"56789", crc32(b"1234")) == 0xCBF43926


def test_keystream_seed_one():
    assert keystream(1, 64) == xorshift_bytes(1, 64)
    assert keystream(1, 8) == (0x47E4CE4B896CDD1D).to_bytes(8, "little")


@given(st.integers(min_value=1, max_value=2**64 - 1), st.integers(min_value=0, max_value=300))
@settings(max_examples=200)
def test_keystream_matches_oracle(seed, length):
    assert keystream(seed, length) == xorshift_bytes(seed, length)


def test_keystream_prefix_property():
    assert keystream(99, 13) == keystream(99, 64)[:13]


def test_zero_seed():
    with pytest.raises(ZeroSeed):
        keystream(0, 8)
    with pytest.raises(ZeroSeed):
        obfuscate(b"", 0)


@given(st.binary(max_size=4096), st.integers(min_value=1, max_value=2**64 - 1))
@settings(max_examples=100)
def test_obfuscate_is_an_involution(data, seed):
    assert obfuscate(obfuscate(data, seed), seed) == data
