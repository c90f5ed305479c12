"""Elias omega, gamma and delta codes over arbitrary-precision integers.

All codewords are MSB-first. Omega follows the classic recursive
construction: emit the terminating ``0``, then while ``N > 1`` prepend
``bin(N)`` and continue with ``N = bit_length(N) - 1``.
"""

from __future__ import annotations

import math

from omegalab.bits import BitString
from omegalab.errors import TruncatedStream

# Largest observed ratio |omega_len(n) - sum_j log2 n_j| / log_star2(n) over
# 2 <= n <= 10^6 (see tests/test_codecs.py::test_remainder_constant).
REMAINDER_CONSTANT = 2.0


def _check_pos(n):
    if not isinstance(n, int) or isinstance(n, bool):
        raise TypeError(f"expected int, got {type(n).__name__}")
    if n < 1:
        raise ValueError(f"expected a positive integer, got {n}")


def beta(n: int) -> int:
    """Binary length of ``n`` (``floor(log2 n) + 1``), exact for big ints."""
    _check_pos(n)
    return n.bit_length()


def omega_chain(n: int) -> list[int]:
    """The values ``n_0 = n, n_1, ...`` whose binary forms make up the codeword.

    Successors are ``beta(n_j) - 1``; the chain stops before reaching 1, so
    ``omega_chain(1) == []``.
    """
    _check_pos(n)
    chain = []
    while n > 1:
        chain.append(n)
        n = n.bit_length() - 1
    return chain


def omega_encode(n: int) -> BitString:
    _check_pos(n)
    parts = ["0"]
    while n > 1:
        parts.append(format(n, "b"))
        n = n.bit_length() - 1
    parts.reverse()
    return BitString("".join(parts))


def omega_len(n: int) -> int:
    """Codeword length in bits without building the codeword."""
    _check_pos(n)
    total = 1
    while n > 1:
        b = n.bit_length()
        total += b
        n = b - 1
    return total


def omega_decode(s, start: int = 0) -> tuple[int, int]:
    """Decode one omega codeword at ``start``; returns ``(n, bits_consumed)``."""
    bits = str(s)
    size = len(bits)
    i = start
    n = 1
    while True:
        if i >= size:
            raise TruncatedStream(f"stream ended at bit {i} inside an omega codeword")
        if bits[i] == "0":
            return n, i + 1 - start
        end = i + n + 1
        if end > size:
            raise TruncatedStream(
                f"omega group needs {n + 1} bits at offset {i}, only {size - i} left")
        n = int(bits[i:end], 2)
        i = end


def gamma_encode(n: int) -> BitString:
    _check_pos(n)
    return BitString("0" * (n.bit_length() - 1) + format(n, "b"))


def gamma_len(n: int) -> int:
    _check_pos(n)
    return 2 * n.bit_length() - 1


def gamma_decode(s, start: int = 0) -> tuple[int, int]:
    bits = str(s)
    one = bits.find("1", start)
    if one < 0:
        raise TruncatedStream(f"no terminating 1 in gamma prefix starting at {start}")
    zeros = one - start
    end = one + zeros + 1
    if end > len(bits):
        raise TruncatedStream(f"gamma codeword at {start} needs {end - start} bits")
    return int(bits[one:end], 2), end - start


def delta_encode(n: int) -> BitString:
    _check_pos(n)
    b = n.bit_length()
    return gamma_encode(b) + format(n, "b")[1:]


def delta_len(n: int) -> int:
    _check_pos(n)
    b = n.bit_length()
    return (b - 1) + 2 * (b.bit_length() - 1) + 1


def delta_decode(s, start: int = 0) -> tuple[int, int]:
    bits = str(s)
    b, used = gamma_decode(bits, start)
    i = start + used
    end = i + b - 1
    if end > len(bits):
        raise TruncatedStream(f"delta codeword at {start} needs {end - start} bits")
    return int("1" + bits[i:end], 2), end - start


ENCODERS = {"omega": omega_encode, "gamma": gamma_encode, "delta": delta_encode}
DECODERS = {"omega": omega_decode, "gamma": gamma_decode, "delta": delta_decode}
LENGTHS = {"omega": omega_len, "gamma": gamma_len, "delta": delta_len}


def encode_many(values, code: str = "omega") -> BitString:
    enc = ENCODERS[code]
    return BitString("".join(enc(v).bits for v in values))


def decode_many(s, code: str = "omega") -> list[int]:
    """Decode a whole stream; every bit must belong to some codeword."""
    dec = DECODERS[code]
    bits = str(s)
    out = []
    pos = 0
    while pos < len(bits):
        n, used = dec(bits, pos)
        out.append(n)
        pos += used
    return out


def log_star2(x) -> int:
    """Iterated base-2 logarithm: applications of log2 until the value is <= 1."""
    if x <= 0:
        raise ValueError(f"log_star2 needs x > 0, got {x}")
    count = 0
    while x > 1:
        x = math.log2(x)
        count += 1
    return count


def log2_chain_sum(n: int) -> float:
    """``sum_j log2 n_j`` over the omega chain of ``n`` (the smooth part of its length)."""
    return sum(math.log2(v) for v in omega_chain(n))
