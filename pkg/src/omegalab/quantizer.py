"""Quantization of a mixed law into a finite code.

Chosen atoms keep their own lengths; each interval cell ``A_j`` of the
density becomes one symbol with mass ``int_{A_j} rho`` and length
``-ln int_{A_j} e^-l``. The report collects the average-length
decomposition

    avg_len = H(pi) + KL(pi || q) + ln(1/K)
    H(pi)   = H(p) - sum_j pi_j ln v_j + KL(rho || rho_bar)

together with the resolution perplexity ``V_Q = exp(sum_j pi_j ln v_j)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np

from omegalab.errors import CoverageError, EmptyCell, LawValidationError
from omegalab.mixedlaw import MASS_TOL, LengthAssignment, MixedLaw, entropy
from omegalab.quadrature import integrate

_COVER_TOL = 1e-12


@dataclass(frozen=True)
class Quantization:
    encoded_atoms: tuple = ()
    cells: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "encoded_atoms", tuple(float(w) for w in self.encoded_atoms))
        object.__setattr__(self, "cells", tuple((float(a), float(b)) for a, b in self.cells))

    @property
    def volumes(self) -> tuple:
        return tuple(b - a for a, b in self.cells)


@dataclass(frozen=True)
class CodeEntry:
    index: str
    mass: float
    length: float
    volume: Optional[float] = None  # None for atoms


@dataclass(frozen=True)
class QuantizedCode:
    entries: tuple

    @property
    def masses(self):
        return np.array([e.mass for e in self.entries])

    @property
    def lengths(self):
        return np.array([e.length for e in self.entries])

    @property
    def cells(self):
        return [e for e in self.entries if e.volume is not None]


def validate_quantization(law: MixedLaw, q: Quantization) -> None:
    problems = []
    locs = {at.w for at in law.atoms}
    for i, w in enumerate(q.encoded_atoms):
        if w not in locs:
            problems.append((f"encode_atoms[{i}]", f"{w} is not an atom of the law"))
    if len(set(q.encoded_atoms)) != len(q.encoded_atoms):
        problems.append(("encode_atoms", "duplicate atoms"))
    support = law.support
    for j, (a, b) in enumerate(q.cells):
        if not b > a:
            problems.append((f"cells[{j}]", f"empty or reversed interval [{a}, {b})"))
            continue
        covered = sum(max(0.0, min(b, sb) - max(a, sa)) for sa, sb in support)
        if covered < (b - a) * (1 - _COVER_TOL):
            problems.append((f"cells[{j}]", f"[{a}, {b}) is not inside the density support"))
    order = sorted(range(len(q.cells)), key=lambda j: q.cells[j][0])
    for prev, nxt in zip(order, order[1:]):
        if q.cells[prev][1] > q.cells[nxt][0]:
            problems.append((f"cells[{nxt}]", f"overlaps cells[{prev}]"))
    if problems:
        raise LawValidationError(problems)


def _cell_kraft_mass(law, lens, a, b):
    """``int_a^b e^-l(x) dx``."""
    if lens.shift is not None:
        return math.exp(-lens.shift) * law.mass_on(a, b)
    parts = []
    for seg in law.segments:
        lo, hi = max(a, seg.a), min(b, seg.b)
        if hi > lo:
            parts.append(integrate(lambda x: np.exp(-lens.length_at(x)), lo, hi))
    return math.fsum(parts)


def quantize(law: MixedLaw, lens: LengthAssignment, q: Quantization) -> QuantizedCode:
    validate_quantization(law, q)
    atom_len = {at.w: (at.p, ell) for at, ell in zip(law.atoms, lens.atom_lengths)}
    entries = []
    for w in q.encoded_atoms:
        p, ell = atom_len[w]
        entries.append(CodeEntry(f"atom:{w:g}", p, ell))
    for j, (a, b) in enumerate(q.cells):
        mass = law.mass_on(a, b)
        if not mass > 0:
            raise EmptyCell(f"cells[{j}] = [{a}, {b}) has zero probability mass")
        kmass = _cell_kraft_mass(law, lens, a, b)
        if not kmass > 0:
            raise EmptyCell(f"cells[{j}] = [{a}, {b}) has infinite codelength")
        entries.append(CodeEntry(f"cell:[{a:g},{b:g})", mass, -math.log(kmass), b - a))
    return QuantizedCode(tuple(entries))


def quantized_kraft(code: QuantizedCode) -> float:
    return math.fsum(math.exp(-e.length) for e in code.entries)


@dataclass(frozen=True)
class DecompositionReport:
    avg_len: float
    H_pi: float
    KL_pi_q: float
    logK_slack: float
    K: float
    full_coverage: bool
    covered_mass: float = 1.0
    base: int = 2
    H_p: Optional[float] = None
    vol_term: Optional[float] = None
    KL_rho_rhobar: Optional[float] = None
    V_Q: Optional[float] = None
    heisenberg_lhs: Optional[float] = None
    heisenberg_rhs: Optional[float] = None
    V: Optional[float] = None
    boltzmann_W: Optional[float] = None
    k_D: Optional[float] = None

    @property
    def identity_a_residual(self) -> float:
        return self.avg_len - self.H_pi - self.KL_pi_q - self.logK_slack

    @property
    def identity_b_residual(self) -> Optional[float]:
        if not self.full_coverage:
            return None
        return self.H_pi - self.H_p + self.vol_term - self.KL_rho_rhobar

    def as_dict(self) -> dict:
        d = asdict(self)
        d["identity_a_residual"] = self.identity_a_residual
        d["identity_b_residual"] = self.identity_b_residual
        return d

    @classmethod
    def csv_header(cls) -> list[str]:
        return [f.name for f in fields(cls)] + ["identity_a_residual", "identity_b_residual"]


def covers_law(law: MixedLaw, q: Quantization, code: QuantizedCode) -> bool:
    if set(q.encoded_atoms) != {at.w for at in law.atoms}:
        return False
    cell_total = sum(q.volumes)
    support_total = sum(b - a for a, b in law.support)
    if abs(cell_total - support_total) > _COVER_TOL * max(1.0, support_total):
        return False
    return abs(math.fsum(e.mass for e in code.entries) - 1.0) <= MASS_TOL


def decomposition_report(law: MixedLaw, lens: LengthAssignment, q: Quantization,
                         base: int = 2, full: Optional[bool] = None) -> DecompositionReport:
    """Both decomposition identities plus the Heisenberg/Boltzmann quantities.

    ``full=None`` computes the entropy-level terms only when the
    quantization covers the whole law; ``full=True`` insists on it.
    Under partial coverage the first identity is taken over the
    conditional masses ``pi / sum(pi)``, which is the only reading in which
    it balances; ``covered_mass`` records ``sum(pi)``.
    """
    if base < 2:
        raise ValueError("display base D must be >= 2")
    code = quantize(law, lens, q)
    covered = math.fsum(code.masses)
    ell = code.lengths
    K = quantized_kraft(code)
    q_s = np.exp(-ell) / K
    complete = covers_law(law, q, code)
    pi = code.masses if complete else code.masses / covered
    avg_len = math.fsum(pi * ell)
    H_pi = -math.fsum(pi * np.log(pi))
    KL_pi_q = math.fsum(pi * np.log(pi / q_s))
    base_fields = dict(avg_len=avg_len, H_pi=H_pi, KL_pi_q=KL_pi_q,
                       logK_slack=-math.log(K), K=K, covered_mass=covered, base=base)

    if full and not complete:
        total = covered
        raise CoverageError(
            f"full decomposition needs the quantization to cover the law "
            f"(sum of masses {total:.12g}, {len(q.encoded_atoms)}/{len(law.atoms)} atoms)")
    if not complete:
        return DecompositionReport(full_coverage=False, **base_fields)

    H_p = entropy(law)
    cells = code.cells
    vol_term = math.fsum(c.mass * math.log(c.volume) for c in cells)
    KL_rho_rhobar = math.fsum(
        law.xlogx_on(a, b) - c.mass * math.log(c.mass / c.volume)
        for c, (a, b) in zip(cells, q.cells))
    V_Q = math.exp(vol_term)
    V = math.exp(H_p)
    return DecompositionReport(
        full_coverage=True,
        H_p=H_p,
        vol_term=vol_term,
        KL_rho_rhobar=KL_rho_rhobar,
        V_Q=V_Q,
        heisenberg_lhs=avg_len,
        heisenberg_rhs=H_p - vol_term,
        V=V,
        boltzmann_W=V / V_Q,
        k_D=1.0 / math.log(base),
        **base_fields,
    )


def boltzmann_check(report: DecompositionReport, D: int = 2) -> tuple[float, float, float]:
    """``(k_D * avg_len, k_D * ln W, gap)`` in base-``D`` units.

    The two agree only in the equality case (uniform density per cell,
    ``K = 1``, ``q = pi``); elsewhere the gap is just reported.
    """
    if not report.full_coverage:
        raise CoverageError("Boltzmann relation needs a full-coverage report")
    if D < 2:
        raise ValueError("D must be >= 2")
    k = 1.0 / math.log(D)
    lbar = k * report.avg_len
    rhs = k * math.log(report.boltzmann_W)
    return lbar, rhs, lbar - rhs


def quantization_from_dict(data) -> Quantization:
    problems = []
    if not isinstance(data, dict):
        raise LawValidationError([("", "quantization must be a JSON object")])
    atoms = data.get("encode_atoms", [])
    if not isinstance(atoms, list):
        problems.append(("encode_atoms", "expected a list"))
        atoms = []
    for i, w in enumerate(atoms):
        if not isinstance(w, (int, float)) or isinstance(w, bool):
            problems.append((f"encode_atoms[{i}]", f"expected a number, got {w!r}"))
    cells = []
    raw_cells = data.get("cells", [])
    if not isinstance(raw_cells, list):
        problems.append(("cells", "expected a list"))
        raw_cells = []
    for j, c in enumerate(raw_cells):
        if not isinstance(c, dict) or not all(
                isinstance(c.get(k), (int, float)) and not isinstance(c.get(k), bool)
                for k in ("a", "b")):
            problems.append((f"cells[{j}]", "expected an object with numeric 'a' and 'b'"))
            continue
        cells.append((c["a"], c["b"]))
    if problems:
        raise LawValidationError(problems)
    return Quantization(tuple(atoms), tuple(cells))


def quantization_to_dict(q: Quantization) -> dict:
    return {"encode_atoms": list(q.encoded_atoms),
            "cells": [{"a": a, "b": b} for a, b in q.cells]}
