"""MSB-first bit strings and the OMGA container format.

Container layout::

    b"OMGA" | version (1 byte) | codec (1 byte) | bit count (u64 LE) | payload

Payload bits are packed MSB-first; pad bits in the last byte must be zero.
"""

from __future__ import annotations

import struct

from omegalab.errors import ContainerError

MAGIC = b"OMGA"
VERSION = 1
CODEC_IDS = {"omega": 1, "gamma": 2, "delta": 3}
CODEC_NAMES = {v: k for k, v in CODEC_IDS.items()}

_HEADER = struct.Struct("<4sBBQ")


class BitString:
    """Immutable sequence of bits, stored as an ASCII '0'/'1' string."""

    __slots__ = ("_bits",)

    def __init__(self, bits: str = ""):
        if not isinstance(bits, str):
            raise TypeError(f"expected str of '0'/'1', got {type(bits).__name__}")
        if bits.strip("01"):
            raise ValueError("bit string may only contain '0' and '1'")
        self._bits = bits

    @classmethod
    def from_int(cls, value: int, width: int) -> BitString:
        """``width`` low bits of ``value``, most significant first."""
        if value < 0 or value.bit_length() > width:
            raise ValueError(f"{value} does not fit in {width} bits")
        return cls(format(value, f"0{width}b") if width else "")

    @classmethod
    def concat(cls, parts) -> BitString:
        return cls("".join(str(p) for p in parts))

    @property
    def bits(self) -> str:
        return self._bits

    def __len__(self):
        return len(self._bits)

    def __str__(self):
        return self._bits

    def __repr__(self):
        return f"BitString({self._bits!r})"

    def __eq__(self, other):
        if isinstance(other, BitString):
            return self._bits == other._bits
        if isinstance(other, str):
            return self._bits == other
        return NotImplemented

    def __hash__(self):
        return hash(self._bits)

    def __add__(self, other):
        if isinstance(other, BitString):
            return BitString(self._bits + other._bits)
        if isinstance(other, str):
            return BitString(self._bits + other)
        return NotImplemented

    def __radd__(self, other):
        if isinstance(other, str):
            return BitString(other + self._bits)
        return NotImplemented

    def __getitem__(self, item):
        if isinstance(item, slice):
            return BitString(self._bits[item])
        return int(self._bits[item])

    def startswith(self, prefix) -> bool:
        return self._bits.startswith(str(prefix))

    def to_bytes(self) -> bytes:
        """Pack MSB-first, zero-padding the final byte."""
        n = len(self._bits)
        if n == 0:
            return b""
        nbytes = (n + 7) // 8
        return (int(self._bits, 2) << (nbytes * 8 - n)).to_bytes(nbytes, "big")

    @classmethod
    def from_bytes(cls, data: bytes, nbits: int) -> BitString:
        if nbits > len(data) * 8:
            raise ContainerError(f"bit count {nbits} exceeds payload of {len(data)} bytes")
        if not data:
            return cls("")
        s = format(int.from_bytes(data, "big"), f"0{len(data) * 8}b")
        return cls(s[:nbits])


def write_container(bits: BitString, codec: str = "omega") -> bytes:
    if codec not in CODEC_IDS:
        raise ValueError(f"unknown codec {codec!r}")
    return _HEADER.pack(MAGIC, VERSION, CODEC_IDS[codec], len(bits)) + bits.to_bytes()


def read_container(data: bytes) -> tuple[str, BitString]:
    """Parse a container; returns ``(codec_name, bits)``."""
    if len(data) < _HEADER.size:
        raise ContainerError("file shorter than container header")
    magic, version, codec_id, nbits = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ContainerError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ContainerError(f"unsupported container version {version}")
    if codec_id not in CODEC_NAMES:
        raise ContainerError(f"unknown codec byte 0x{codec_id:02x}")
    payload = data[_HEADER.size:]
    if len(payload) != (nbits + 7) // 8:
        raise ContainerError(
            f"payload is {len(payload)} bytes but bit count {nbits} needs {(nbits + 7) // 8}")
    pad = len(payload) * 8 - nbits
    if pad and payload[-1] & ((1 << pad) - 1):
        raise ContainerError("nonzero pad bits in final byte")
    return CODEC_NAMES[codec_id], BitString.from_bytes(payload, nbits)


def is_container(data: bytes) -> bool:
    return data[:4] == MAGIC
