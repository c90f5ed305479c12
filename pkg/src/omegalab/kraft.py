"""Exact Kraft sums for omega (and the gamma/delta baselines).

Every integer with binary length ``k`` gets the same codeword length in
all three codes, so the Kraft sum over ``beta(n) <= K`` reduces to K block
terms ``2^(k-1) * 2^-len(2^(k-1))``. For omega this is
``S_k = 2^(-omega_len(k-1) - 1)`` (``S_1 = 1/2``).

All sums are carried as :class:`Dyadic` values; no rounding ever happens.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import total_ordering

import numpy as np

from omegalab.codecs import LENGTHS, omega_len
from omegalab.errors import ResourceLimit

# Length tables are int8; 2^28 entries is 256 MiB.
DEFAULT_MAX_BLOCKS = 1 << 28
BRUTE_LIMIT = 10**7


@total_ordering
class Dyadic:
    """Exact ``numerator / 2**exponent`` with ``numerator >= 0``, kept canonical."""

    __slots__ = ("numerator", "exponent")

    def __init__(self, numerator: int, exponent: int = 0):
        if numerator < 0:
            raise ValueError("Dyadic values are nonnegative")
        if exponent < 0:
            numerator <<= -exponent
            exponent = 0
        if numerator == 0:
            exponent = 0
        else:
            tz = (numerator & -numerator).bit_length() - 1
            shift = min(tz, exponent)
            numerator >>= shift
            exponent -= shift
        self.numerator = numerator
        self.exponent = exponent

    @classmethod
    def pow2(cls, e: int) -> Dyadic:
        """``2**-e``."""
        return cls(1, e)

    def _align(self, other):
        e = max(self.exponent, other.exponent)
        return self.numerator << (e - self.exponent), other.numerator << (e - other.exponent), e

    def __add__(self, other):
        if not isinstance(other, Dyadic):
            if isinstance(other, int):
                other = Dyadic(other)
            else:
                return NotImplemented
        a, b, e = self._align(other)
        return Dyadic(a + b, e)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = Dyadic(other)
        if not isinstance(other, Dyadic):
            return NotImplemented
        a, b, e = self._align(other)
        if a < b:
            raise ValueError("Dyadic subtraction would go negative")
        return Dyadic(a - b, e)

    def __rsub__(self, other):
        if isinstance(other, int):
            return Dyadic(other) - self
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, int):
            return Dyadic(self.numerator * other, self.exponent)
        if isinstance(other, Dyadic):
            return Dyadic(self.numerator * other.numerator, self.exponent + other.exponent)
        return NotImplemented

    __rmul__ = __mul__

    def half(self) -> Dyadic:
        return Dyadic(self.numerator, self.exponent + 1)

    def __eq__(self, other):
        if isinstance(other, int):
            other = Dyadic(other) if other >= 0 else None
            if other is None:
                return False
        if isinstance(other, Fraction):
            return self.to_fraction() == other
        if not isinstance(other, Dyadic):
            return NotImplemented
        return self.numerator == other.numerator and self.exponent == other.exponent

    def __lt__(self, other):
        if isinstance(other, int):
            other = Dyadic(max(other, 0)) if other >= 0 else None
            if other is None:
                return False
        if isinstance(other, Fraction):
            return self.to_fraction() < other
        if not isinstance(other, Dyadic):
            return NotImplemented
        a, b, _ = self._align(other)
        return a < b

    def __hash__(self):
        return hash(self.to_fraction())

    def __float__(self):
        return float(self.to_fraction())

    def __repr__(self):
        return f"Dyadic({self.numerator}, {self.exponent})"

    def __str__(self):
        return f"{self.numerator}/2^{self.exponent}"

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def decimal(self, digits: int) -> str:
        """Decimal expansion truncated (not rounded) to ``digits`` places."""
        if digits < 0:
            raise ValueError("digits must be >= 0")
        whole, rem = divmod(self.numerator, 1 << self.exponent)
        if digits == 0:
            return str(whole)
        frac = (rem * 10**digits) >> self.exponent
        return f"{whole}.{frac:0{digits}d}"


def _code_len(code):
    try:
        return LENGTHS[code]
    except KeyError:
        raise ValueError(f"unknown code {code!r}") from None


def block_sum(k: int, code: str = "omega") -> Dyadic:
    """Kraft mass of the block ``I_k = {n : beta(n) = k}``."""
    if k < 1:
        raise ValueError("block index k must be >= 1")
    if code == "omega":
        return Dyadic.pow2(1) if k == 1 else Dyadic.pow2(omega_len(k - 1) + 1)
    length = _code_len(code)(1 << (k - 1))
    return Dyadic(1, length - (k - 1))


def omega_length_table(n_max: int) -> np.ndarray:
    """``table[n] = omega_len(n)`` for ``0 < n <= n_max`` (``table[0]`` unused).

    Filled block by block from ``omega_len(n) = omega_len(beta(n) - 1) + beta(n)``.
    """
    table = np.zeros(n_max + 1, dtype=np.int16)
    if n_max >= 1:
        table[1] = 1
    k = 2
    while (1 << (k - 1)) <= n_max:
        lo = 1 << (k - 1)
        hi = min((1 << k) - 1, n_max)
        table[lo:hi + 1] = table[k - 1] + k
        k += 1
    return table


def _length_histogram(table, workers):
    body = table[1:]
    if workers <= 1 or body.size < 1 << 20:
        return np.bincount(body)
    chunks = np.array_split(body, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(np.bincount, chunks))
    size = max(p.size for p in parts)
    return sum(np.pad(p, (0, size - p.size)) for p in parts)


def _dyadic_from_histogram(hist, extra_exponent=0) -> Dyadic:
    total = Dyadic(0)
    for length, count in enumerate(hist.tolist()):
        if count:
            total = total + Dyadic(count, length + extra_exponent)
    return total


def partial_sum_beta_le(K: int, code: str = "omega", *, max_blocks: int = DEFAULT_MAX_BLOCKS,
                        workers: int = 1) -> Dyadic:
    """Exact ``sum_{n < 2^K} 2^-len(n)``, i.e. blocks ``1..K``.

    For omega the K-1 codelengths ``omega_len(k-1)`` are tabulated and
    histogrammed, so ``K = 2^24`` costs a 16M-entry table. The result does
    not depend on ``workers``.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if K > max_blocks:
        raise ResourceLimit(f"K = {K} exceeds the configured cap of {max_blocks} blocks")
    if code != "omega":
        total = Dyadic(0)
        for k in range(1, K + 1):
            total = total + block_sum(k, code)
        return total
    # S = 1/2 + sum_{k=2}^{K} 2^(-omega_len(k-1) - 1)
    table = omega_length_table(K - 1)
    hist = _length_histogram(table, workers)
    return Dyadic.pow2(1) + _dyadic_from_histogram(hist, extra_exponent=1)


def brute_partial_sum(N: int, code: str = "omega") -> Dyadic:
    """``sum_{n=1}^{N} 2^-len(n)`` one integer at a time (oracle path)."""
    if N < 0:
        raise ValueError("N must be >= 0")
    if N > BRUTE_LIMIT:
        raise ResourceLimit(f"brute-force sum limited to N <= {BRUTE_LIMIT}")
    length = _code_len(code)
    counts: dict[int, int] = {}
    for n in range(1, N + 1):
        ell = length(n)
        counts[ell] = counts.get(ell, 0) + 1
    total = Dyadic(0)
    for ell in sorted(counts):
        total = total + Dyadic(counts[ell], ell)
    return total


def completeness_gap(K: int, code: str = "omega", **kwargs) -> Dyadic:
    """``1 - partial_sum_beta_le(K)``."""
    return 1 - partial_sum_beta_le(K, code, **kwargs)


def self_similar_sum(K: int) -> Dyadic:
    """``1/2 + 1/2 * sum_{j=1}^{K-1} 2^-omega_len(j)`` via the brute oracle."""
    return Dyadic.pow2(1) + brute_partial_sum(K - 1).half()


def float_partial_sum(K: int) -> float:
    """Floating-point profile path only; not used by any verified result."""
    table = omega_length_table(K - 1)
    return 0.5 + float(np.sum(np.ldexp(0.5, -table[1:].astype(np.int64))))
