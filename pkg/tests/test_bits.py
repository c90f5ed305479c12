from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from omegalab.bits import BitString, is_container, read_container, write_container
from omegalab.codecs import decode_many, encode_many
from omegalab.errors import ContainerError

DATA = Path(__file__).parent / "data"
bitstrings = st.text(alphabet="01", max_size=200).map(BitString)


@given(bitstrings, bitstrings, bitstrings)
def test_concat_associative(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + BitString() == a == BitString() + a


@given(bitstrings, st.sampled_from(["omega", "gamma", "delta"]))
def test_container_roundtrip(bits, code):
    blob = write_container(bits, code)
    assert is_container(blob)
    assert read_container(blob) == (code, bits)


def test_container_layout():
    blob = write_container(BitString("0100110"), "omega")
    assert blob == b"OMGA\x01\x01" + (7).to_bytes(8, "little") + b"\x4c"
    assert write_container(BitString(""), "gamma") == b"OMGA\x01\x02" + bytes(8)


@pytest.mark.parametrize("blob, msg", [
    (b"OMG", "shorter"),
    (b"XMGA\x01\x01" + bytes(8), "magic"),
    (b"OMGA\x02\x01" + bytes(8), "version"),
    (b"OMGA\x01\x09" + bytes(8), "codec"),
    (b"OMGA\x01\x01" + (7).to_bytes(8, "little") + b"\x4d", "pad"),
    (b"OMGA\x01\x01" + (9).to_bytes(8, "little") + b"\x4c", "payload"),
])
def test_container_errors(blob, msg):
    with pytest.raises(ContainerError, match=msg):
        read_container(blob)


def test_bitstring_validation():
    with pytest.raises(ValueError):
        BitString("0120")
    assert BitString.from_int(5, 4) == "0101"
    assert BitString("101")[0] == 1 and BitString("101")[1:] == "01"


@pytest.mark.parametrize("name", ["small", "big", "mixed"])
def test_golden_corpora(name):
    values = [int(v) for v in (DATA / f"corpus_{name}.txt").read_text().split()]
    golden = (DATA / f"corpus_{name}.omga").read_bytes()
    assert write_container(encode_many(values), "omega") == golden
    code, bits = read_container(golden)
    assert code == "omega"
    assert decode_many(bits, code) == values
