"""Mixed discrete/continuous source laws on [1, inf) and their codelengths.

A law is a finite set of atoms ``(w, P(w))`` plus a density made of
disjoint segments. Lengths are in nats; the Kraft measure is counting
measure on atoms plus Lebesgue measure on the segments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from omegalab.errors import LawValidationError, QuadratureFailure, ZeroMassRegion
from omegalab.quadrature import integrate, richardson_error
from omegalab.renorm import ell_star

MASS_TOL = 1e-9
GRID_TOL = 1e-10


def _xlogx_antideriv(y):
    # d/dy [y^2/2 ln y - y^2/4] = y ln y, with the y -> 0 limit equal to 0
    return 0.0 if y <= 0 else 0.5 * y * y * math.log(y) - 0.25 * y * y


@dataclass(frozen=True)
class Atom:
    w: float
    p: float


class Segment:
    """Density piece on ``[a, b)``. Subclasses supply the density itself."""

    kind = "segment"
    a: float
    b: float

    def density(self, x):
        raise NotImplementedError

    def _clip(self, lo, hi):
        lo = self.a if lo is None else max(lo, self.a)
        hi = self.b if hi is None else min(hi, self.b)
        return lo, hi

    def mass(self, lo=None, hi=None) -> float:
        raise NotImplementedError

    def xlogx(self, lo=None, hi=None) -> float:
        """``int rho ln rho`` over ``[lo, hi]`` intersected with the segment."""
        raise NotImplementedError

    def density_range(self) -> tuple[float, float]:
        raise NotImplementedError

    def vanishes_inside(self) -> bool:
        """True if rho hits zero somewhere in the open interval ``(a, b)``."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstSegment(Segment):
    a: float
    b: float
    rho: float
    kind = "const"

    def density(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.rho)

    def mass(self, lo=None, hi=None):
        lo, hi = self._clip(lo, hi)
        return max(hi - lo, 0.0) * self.rho

    def xlogx(self, lo=None, hi=None):
        lo, hi = self._clip(lo, hi)
        if hi <= lo or self.rho == 0:
            return 0.0
        return (hi - lo) * self.rho * math.log(self.rho)

    def density_range(self):
        return self.rho, self.rho

    def vanishes_inside(self):
        return self.rho <= 0

    def to_dict(self):
        return {"kind": "const", "a": self.a, "b": self.b, "rho": self.rho}


@dataclass(frozen=True)
class LinearSegment(Segment):
    """Density varying linearly from ``rho_a`` at ``a`` to ``rho_b`` at ``b``."""

    a: float
    b: float
    rho_a: float
    rho_b: float
    kind = "linear"

    @property
    def slope(self):
        return (self.rho_b - self.rho_a) / (self.b - self.a)

    def density(self, x):
        return self.rho_a + self.slope * (np.asarray(x, dtype=float) - self.a)

    def _at(self, x):
        return self.rho_a + self.slope * (x - self.a)

    def mass(self, lo=None, hi=None):
        lo, hi = self._clip(lo, hi)
        if hi <= lo:
            return 0.0
        return 0.5 * (self._at(lo) + self._at(hi)) * (hi - lo)

    def xlogx(self, lo=None, hi=None):
        lo, hi = self._clip(lo, hi)
        if hi <= lo:
            return 0.0
        ylo, yhi = self._at(lo), self._at(hi)
        if abs(yhi - ylo) <= 1e-6 * max(abs(ylo), abs(yhi)):
            # nearly flat: the antiderivative difference would cancel badly
            return integrate(lambda x: _xlogx(self.density(x)), lo, hi, tol=1e-15)
        return (_xlogx_antideriv(max(yhi, 0.0)) - _xlogx_antideriv(max(ylo, 0.0))) / self.slope

    def density_range(self):
        return min(self.rho_a, self.rho_b), max(self.rho_a, self.rho_b)

    def vanishes_inside(self):
        # linear and nonnegative at both ends: zero inside only if zero throughout
        return self.rho_a <= 0 and self.rho_b <= 0

    def to_dict(self):
        return {"kind": "linear", "a": self.a, "b": self.b,
                "rho_a": self.rho_a, "rho_b": self.rho_b}


@dataclass(frozen=True)
class GridSegment(Segment):
    """Uniform samples of the density (endpoints included), cubic-spline interpolated.

    ``(len(values) - 1) % 4 == 0`` so Simpson and its half-grid estimate
    both apply; a grid whose Richardson estimate of the mass exceeds
    ``tol`` is rejected as too coarse.
    """

    a: float
    b: float
    values: tuple
    tol: float = GRID_TOL
    kind = "grid"
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) < 5 or (len(vals) - 1) % 4:
            raise ValueError("grid segments need 4k+1 samples (k >= 1)")
        nodes = np.linspace(self.a, self.b, len(vals))
        object.__setattr__(self, "_spline", CubicSpline(nodes, np.array(vals)))

    @property
    def h(self):
        return (self.b - self.a) / (len(self.values) - 1)

    def check_resolution(self):
        err = richardson_error(self.values, self.h)
        if err > self.tol:
            raise QuadratureFailure(
                f"grid on [{self.a}, {self.b}] too coarse: Simpson error estimate {err:.3g} "
                f"exceeds {self.tol:g}")

    def density(self, x):
        return self._spline(np.asarray(x, dtype=float))

    def mass(self, lo=None, hi=None):
        self.check_resolution()
        lo, hi = self._clip(lo, hi)
        if hi <= lo:
            return 0.0
        return float(self._spline.integrate(lo, hi))

    def xlogx(self, lo=None, hi=None):
        self.check_resolution()
        lo, hi = self._clip(lo, hi)
        if hi <= lo:
            return 0.0
        return integrate(lambda x: _xlogx(self.density(x)), lo, hi)

    def density_range(self):
        x = np.linspace(self.a, self.b, 64 * (len(self.values) - 1) + 1)
        y = self.density(x)
        return float(y.min()), float(y.max())

    def vanishes_inside(self):
        x = np.linspace(self.a, self.b, 64 * (len(self.values) - 1) + 1)[1:-1]
        return bool((self.density(x) <= 0).any())

    def to_dict(self):
        return {"kind": "grid", "a": self.a, "b": self.b, "values": list(self.values)}


def _xlogx(y):
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    pos = y > 0
    out[pos] = y[pos] * np.log(y[pos])
    return out


@dataclass(frozen=True)
class MixedLaw:
    atoms: tuple = ()
    segments: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "segments", tuple(self.segments))
        violations = _law_violations(self)
        if violations:
            raise LawValidationError(violations)

    @property
    def atom_mass(self) -> float:
        return math.fsum(at.p for at in self.atoms)

    @property
    def density_mass(self) -> float:
        return math.fsum(seg.mass() for seg in self.segments)

    @property
    def support(self) -> list[tuple[float, float]]:
        return sorted((seg.a, seg.b) for seg in self.segments)

    def segment_at(self, x: float) -> Optional[Segment]:
        for seg in self.segments:
            if seg.a <= x < seg.b:
                return seg
        return None

    def density(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        # closed intervals, later segments win: the right endpoint of the last
        # piece stays evaluable for quadrature nodes
        for seg in sorted(self.segments, key=lambda s: s.a):
            inside = (x >= seg.a) & (x <= seg.b)
            if inside.any():
                out[inside] = seg.density(x[inside])
        return out

    def mass_on(self, lo: float, hi: float) -> float:
        return math.fsum(seg.mass(lo, hi) for seg in self.segments)

    def xlogx_on(self, lo: float, hi: float) -> float:
        return math.fsum(seg.xlogx(lo, hi) for seg in self.segments)


def _law_violations(law):
    out = []
    locs = set()
    for i, at in enumerate(law.atoms):
        if not at.w >= 1:
            out.append((f"atoms[{i}].w", f"atom location {at.w} must be >= 1"))
        if not at.p > 0:
            out.append((f"atoms[{i}].p", f"atom mass {at.p} must be > 0"))
        if at.w in locs:
            out.append((f"atoms[{i}].w", f"duplicate atom location {at.w}"))
        locs.add(at.w)
    for j, seg in enumerate(law.segments):
        if not seg.a >= 1:
            out.append((f"segments[{j}].a", f"segment start {seg.a} must be >= 1"))
        if not seg.b > seg.a:
            out.append((f"segments[{j}].b", f"segment end {seg.b} must exceed start {seg.a}"))
            continue
        lo, _ = seg.density_range()
        if lo < 0:
            out.append((f"segments[{j}]", f"density goes negative (min {lo:.6g})"))
        for i, at in enumerate(law.atoms):
            if seg.a <= at.w < seg.b:
                out.append((f"atoms[{i}].w", f"atom {at.w} lies inside segments[{j}] support"))
    order = sorted(range(len(law.segments)), key=lambda j: law.segments[j].a)
    for prev, nxt in zip(order, order[1:]):
        if law.segments[prev].b > law.segments[nxt].a:
            out.append((f"segments[{nxt}]", f"overlaps segments[{prev}]"))
    if not out:
        total = law.atom_mass + law.density_mass
        if abs(total - 1.0) > MASS_TOL:
            out.append(("", f"total mass {total:.12g} differs from 1 by more than {MASS_TOL:g}"))
    return out


@dataclass(frozen=True)
class LengthAssignment:
    """Per-atom lengths plus a vectorized length function on the density support.

    When ``shift`` is set, the density part is known to equal
    ``-ln rho(x) + shift`` and integrals use closed forms.
    """

    atom_lengths: tuple
    density_length: Optional[Callable] = None
    shift: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "atom_lengths", tuple(float(v) for v in self.atom_lengths))

    def length_at(self, x):
        if self.density_length is None:
            raise ValueError("length assignment has no density part")
        return np.asarray(self.density_length(np.asarray(x, dtype=float)), dtype=float)

    def shifted(self, c: float) -> LengthAssignment:
        """Every length increased by ``c`` nats."""
        fn = self.density_length
        return LengthAssignment(
            tuple(v + c for v in self.atom_lengths),
            None if fn is None else (lambda x, fn=fn: fn(x) + c),
            None if self.shift is None else self.shift + c,
        )


def entropy(law: MixedLaw) -> float:
    """``-sum P ln P - int rho ln rho`` in nats (continuous part is differential)."""
    discrete = -math.fsum(at.p * math.log(at.p) for at in law.atoms)
    continuous = -math.fsum(seg.xlogx() for seg in law.segments)
    return discrete + continuous


def implied_lengths(law: MixedLaw, allow_negative: bool = False) -> LengthAssignment:
    """``-ln P(w)`` on atoms and ``-ln rho(x)`` on the density.

    Densities above 1 would give negative lengths and are refused unless
    ``allow_negative`` is set.
    """
    for j, seg in enumerate(law.segments):
        if seg.vanishes_inside():
            raise ZeroMassRegion(f"segments[{j}]: density vanishes inside ({seg.a}, {seg.b})")
        _, hi = seg.density_range()
        if hi > 1 and not allow_negative:
            raise ValueError(
                f"segments[{j}]: density {hi:g} > 1 gives negative implied lengths")

    def dens_len(x, law=law):
        return -np.log(law.density(x))

    return LengthAssignment(
        tuple(-math.log(at.p) for at in law.atoms),
        dens_len if law.segments else None,
        0.0,
    )


def _seg_integral(seg, fn, lo=None, hi=None):
    lo, hi = seg._clip(lo, hi)
    if hi <= lo:
        return 0.0
    return integrate(fn, lo, hi)


def kraft_integral(law: MixedLaw, lens: LengthAssignment) -> float:
    """``sum_w e^-l(w) + int e^-l(x) dx`` over the density support."""
    _check_lens(law, lens)
    parts = [math.exp(-v) for v in lens.atom_lengths]
    for seg in law.segments:
        if lens.shift is not None:
            parts.append(math.exp(-lens.shift) * seg.mass())
        else:
            parts.append(_seg_integral(seg, lambda x: np.exp(-lens.length_at(x))))
    return math.fsum(parts)


def expected_length(law: MixedLaw, lens: LengthAssignment) -> float:
    _check_lens(law, lens)
    parts = [at.p * v for at, v in zip(law.atoms, lens.atom_lengths)]
    for seg in law.segments:
        if lens.shift is not None:
            parts.append(-seg.xlogx() + lens.shift * seg.mass())
        else:
            parts.append(_seg_integral(seg, lambda x, s=seg: s.density(x) * lens.length_at(x)))
    return math.fsum(parts)


def kl_to_kraft(law: MixedLaw, lens: LengthAssignment, K: float) -> float:
    """``D_KL(p || q)`` for the Kraft distribution ``q = e^-l / K``."""
    logK = math.log(K)
    parts = [at.p * (math.log(at.p) + v + logK) for at, v in zip(law.atoms, lens.atom_lengths)]
    for seg in law.segments:
        if lens.shift is not None:
            # rho ln(rho / q) = rho (shift + ln K) pointwise
            parts.append(seg.mass() * (lens.shift + logK))
        else:
            def integrand(x, s=seg):
                r = s.density(x)
                return _xlogx(r) + r * (lens.length_at(x) + logK)
            parts.append(_seg_integral(seg, integrand))
    return math.fsum(parts)


def _check_lens(law, lens):
    if len(lens.atom_lengths) != len(law.atoms):
        raise ValueError(
            f"length assignment has {len(lens.atom_lengths)} atom lengths, law has {len(law.atoms)} atoms")
    if law.segments and lens.density_length is None:
        raise ValueError("law has a density but the length assignment has no density part")


@dataclass(frozen=True)
class ShannonReport:
    E_len: float
    H: float
    KL: float
    logK: float
    K: float

    @property
    def residual(self) -> float:
        """``E_len - H - KL + logK``; zero up to rounding."""
        return self.E_len - self.H - self.KL + self.logK


def shannon_identity_report(law: MixedLaw, lens: LengthAssignment) -> ShannonReport:
    K = kraft_integral(law, lens)
    if not (K > 0 and math.isfinite(K)):
        raise ValueError(f"Kraft integral must be finite and positive, got {K}")
    return ShannonReport(
        E_len=expected_length(law, lens),
        H=entropy(law),
        KL=kl_to_kraft(law, lens, K),
        logK=math.log(K),
        K=K,
    )


# --- truncated fixed-point laws ------------------------------------------

def _ell_star_array(x):
    return np.array([ell_star(float(v)) for v in np.atleast_1d(x)])


def _towers(limit):
    """0, 1, e, e^e, ... (in log coordinates) up to ``limit``."""
    pts = [0.0, 1.0]
    while pts[-1] < limit:
        pts.append(math.exp(pts[-1]))
    return pts


@dataclass(frozen=True)
class FixedPointTruncation:
    X: float
    K: float
    E_len: float
    H: float

    @property
    def excess(self) -> float:
        """``E[ell*] - H``; analytically ``-ln K``."""
        return self.E_len - self.H


def truncated_fixed_point(X: float) -> FixedPointTruncation:
    """Law ``e^-ell*(x) / K(X)`` on ``[1, X]`` and its length/entropy balance.

    Integrals run in ``u = ln x``, split where the log chain gains a term,
    so every piece is smooth.
    """
    if X <= 1:
        raise ValueError("X must exceed 1")
    U = math.log(X)

    def weight(u):
        # e^{-ell*(e^u)} e^u, and ell*(e^u) = u + ell*(u) for u >= 1
        u = np.asarray(u, dtype=float)
        return np.exp(-_ell_star_array(np.maximum(u, 1.0)) * (u >= 1))

    def length(u):
        u = np.asarray(u, dtype=float)
        return u + _ell_star_array(np.maximum(u, 1.0)) * (u >= 1)

    edges = [t for t in _towers(U) if t < U] + [U]
    pieces = list(zip(edges, edges[1:]))
    K = math.fsum(integrate(weight, lo, hi, tol=1e-13) for lo, hi in pieces)
    e_len = math.fsum(integrate(lambda u: weight(u) * length(u), lo, hi, tol=1e-13)
                      for lo, hi in pieces) / K

    def plogp(u):
        p = weight(u) * np.exp(-u) / K
        return -p * np.log(p) * np.exp(u)

    H = math.fsum(integrate(plogp, lo, hi, tol=1e-13) for lo, hi in pieces)
    return FixedPointTruncation(X=X, K=K, E_len=e_len, H=H)


# --- JSON-compatible law files ---------------------------------------------

def law_from_dict(data) -> MixedLaw:
    """Build a law from ``{"atoms": [...], "segments": [...]}``, collecting every problem."""
    violations = []
    if not isinstance(data, dict):
        raise LawValidationError([("", "law must be a JSON object")])
    atoms = []
    for i, item in enumerate(data.get("atoms", []) or []):
        path = f"atoms[{i}]"
        if not isinstance(item, dict):
            violations.append((path, "atom must be an object with 'w' and 'p'"))
            continue
        w = _number(item, "w", path, violations)
        p = _number(item, "p", path, violations)
        if w is not None and p is not None:
            atoms.append(Atom(w, p))
    segments = []
    for j, item in enumerate(data.get("segments", []) or []):
        path = f"segments[{j}]"
        if not isinstance(item, dict):
            violations.append((path, "segment must be an object"))
            continue
        kind = item.get("kind")
        a = _number(item, "a", path, violations)
        b = _number(item, "b", path, violations)
        if kind == "const":
            rho = _number(item, "rho", path, violations)
            if None not in (a, b, rho):
                segments.append(ConstSegment(a, b, rho))
        elif kind == "linear":
            ra = _number(item, "rho_a", path, violations)
            rb = _number(item, "rho_b", path, violations)
            if None not in (a, b, ra, rb):
                segments.append(LinearSegment(a, b, ra, rb))
        elif kind == "grid":
            vals = item.get("values")
            if not isinstance(vals, list) or not all(_is_num(v) for v in vals):
                violations.append((f"{path}.values", "expected a list of numbers"))
            elif len(vals) < 5 or (len(vals) - 1) % 4:
                violations.append((f"{path}.values", "grid needs 4k+1 samples (k >= 1)"))
            elif None not in (a, b):
                if b <= a:
                    violations.append((f"{path}.b", f"segment end {b} must exceed start {a}"))
                else:
                    segments.append(GridSegment(a, b, tuple(vals)))
        else:
            violations.append((f"{path}.kind", f"unknown segment kind {kind!r}"))
    extra = set(data) - {"atoms", "segments", "encode_atoms", "cells"}
    for key in sorted(extra):
        violations.append((key, "unknown field"))
    if violations:
        raise LawValidationError(violations)
    return MixedLaw(tuple(atoms), tuple(segments))


def law_to_dict(law: MixedLaw) -> dict:
    return {
        "atoms": [{"w": at.w, "p": at.p} for at in law.atoms],
        "segments": [seg.to_dict() for seg in law.segments],
    }


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _number(item, key, path, violations):
    if key not in item:
        violations.append((f"{path}.{key}", "missing"))
        return None
    v = item[key]
    if not _is_num(v):
        violations.append((f"{path}.{key}", f"expected a finite number, got {v!r}"))
        return None
    return float(v)
