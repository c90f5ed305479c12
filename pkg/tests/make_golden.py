"""Regenerate the golden container files in tests/data.

The codewords come from the length recursion ``code(n) = code(beta(n) - 1) + bin(n)``
(``code(1) = "0"`` is the terminator, so the recursion prepends groups),
written independently of the package encoder.
"""

import struct
from pathlib import Path

DATA = Path(__file__).parent / "data"


def omega_bits(n):
    if n == 1:
        return "0"
    return omega_bits(n.bit_length() - 1)[:-1] + format(n, "b") + "0"


def container(bits):
    payload = b""
    if bits:
        nbytes = (len(bits) + 7) // 8
        payload = int(bits.ljust(nbytes * 8, "0"), 2).to_bytes(nbytes, "big")
    return b"OMGA" + bytes([1, 1]) + struct.pack("<Q", len(bits)) + payload


def main():
    for name in ("small", "big", "mixed"):
        values = [int(v) for v in (DATA / f"corpus_{name}.txt").read_text().split()]
        bits = "".join(omega_bits(v) for v in values)
        (DATA / f"corpus_{name}.omga").write_bytes(container(bits))


if __name__ == "__main__":
    main()
