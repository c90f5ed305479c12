"""Renormalization flow ``T[l](x) = l(ln x) + ln x`` on codelength functions.

Lengths are in nats. The fixed point is the iterated-log length
``ell_star(x) = ln x + ln ln x + ...``, keeping a term only while its
argument exceeds 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from omegalab.errors import DomainError

# Recorded empirically over 2 <= n <= 10^6, see
# tests/test_renorm.py::test_omega_consistency_constant.
OMEGA_CONSISTENCY_CONSTANT = 2.0


@dataclass(frozen=True)
class LogChain:
    """``entries[0] = x``, ``entries[i+1] = ln entries[i]`` while ``entries[i] > 1``."""

    entries: tuple[float, ...]

    @property
    def depth(self) -> int:
        return len(self.entries) - 1

    @property
    def terms(self) -> tuple[float, ...]:
        return self.entries[1:]

    @property
    def tail(self) -> float:
        return self.entries[-1]


@dataclass(frozen=True)
class CodelengthFn:
    """A codelength function with a descriptive tag.

    ``domain_min`` is the smallest argument ``fn`` accepts. Flow iterates
    are ``CodelengthFn`` objects too, built by :func:`iterate`, and record
    their generation.
    """

    fn: Callable[[float], float]
    description: str = "table"
    domain_min: float = 0.0
    generation: int = 0
    base: CodelengthFn | None = field(default=None, repr=False, compare=False)

    def __call__(self, x: float) -> float:
        if x < self.domain_min:
            raise DomainError(f"{self.description} is undefined at {x!r} (< {self.domain_min})")
        return self.fn(x)

    @classmethod
    def zero(cls) -> CodelengthFn:
        return cls(lambda t: 0.0, "zero")

    @classmethod
    def constant(cls, c: float) -> CodelengthFn:
        if c < 0:
            raise ValueError("codelengths must be nonnegative")
        return cls(lambda t: float(c), f"constant {c}")

    @classmethod
    def from_callable(cls, fn, description="table", domain_min=0.0) -> CodelengthFn:
        return cls(fn, description, domain_min)


def log_chain(x: float) -> LogChain:
    if x < 1:
        raise DomainError(f"log chain needs x >= 1, got {x}")
    entries = [float(x)]
    while entries[-1] > 1:
        entries.append(math.log(entries[-1]))
    return LogChain(tuple(entries))


def ell_star(x: float) -> float:
    """Iterated-log fixed-point length in nats."""
    return math.fsum(log_chain(x).terms)


def ell_star_fn() -> CodelengthFn:
    # ell_star is only defined for x >= 1; apply_T evaluates it at ln x.
    return CodelengthFn(ell_star, "ell_star", domain_min=1.0)


def apply_T(f, x: float) -> float:
    """One renormalization step ``f(ln x) + ln x`` evaluated at ``x >= 1``."""
    if x < 1:
        raise DomainError(f"T is applied on x >= 1, got {x}")
    lx = math.log(x)
    return f(lx) + lx


def iterate(f0: CodelengthFn, m: int) -> CodelengthFn:
    """``T^m f0`` as a lazily evaluated function (domain ``x >= 1`` once ``m >= 1``)."""
    if m < 0:
        raise ValueError("iteration count must be >= 0")
    g = f0
    for k in range(1, m + 1):
        prev = g
        g = CodelengthFn(lambda x, prev=prev: apply_T(prev, x),
                         f"T^{k}[{f0.description}]", domain_min=1.0,
                         generation=k, base=f0)
    return g


def flow(f0, x: float, m: int) -> float:
    """``(T^m f0)(x) = sum_{i=1}^{m} x_i + f0(x_m)`` with ``x_0 = x``, ``x_i = ln x_{i-1}``.

    Every intermediate iterate is only defined on ``[1, inf)``, so ``m``
    beyond the chain depth raises :class:`DomainError` unless the chain
    lands exactly on 1.
    """
    if m < 0:
        raise ValueError("iteration count must be >= 0")
    if not isinstance(f0, CodelengthFn):
        f0 = CodelengthFn.from_callable(f0)
    if x < 1:
        raise DomainError(f"flow is evaluated on x >= 1, got {x}")
    total = []
    cur = float(x)
    for step in range(m):
        if cur < 1:
            raise DomainError(
                f"iterate T^{m - step} needs argument >= 1 but chain reached {cur!r} "
                f"after {step} steps")
        cur = math.log(cur)
        total.append(cur)
    return math.fsum(total) + f0(cur)


def convergence_gap(f0, x: float) -> float:
    """``|flow(f0, x, depth(x)) - ell_star(x)|``; equals ``f0`` at the chain tail."""
    chain = log_chain(x)
    return abs(flow(f0, x, chain.depth) - math.fsum(chain.terms))


def log_grid(lo: float, hi: float, points: int) -> np.ndarray:
    """``points`` log-spaced values in ``[lo, hi]``; safe up to ``hi ~ 1e308``."""
    if points < 1:
        raise ValueError("points must be >= 1")
    if points == 1:
        return np.array([float(lo)])
    grid = np.exp(np.linspace(math.log(lo), math.log(hi), points))
    grid[0], grid[-1] = lo, hi
    return grid


def nats_to_bits(v: float) -> float:
    return v / math.log(2)
