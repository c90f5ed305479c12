"""Seeded random instances and batch runners behind ``omegalab suite``.

Instance ``i`` of a run with seed ``S`` draws from
``numpy.random.default_rng([S, i])``, so a row never depends on how the
batch is split across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from omegalab.kraft import brute_partial_sum, completeness_gap, partial_sum_beta_le
from omegalab.mixedlaw import (
    Atom,
    ConstSegment,
    GridSegment,
    LengthAssignment,
    LinearSegment,
    MixedLaw,
    implied_lengths,
    shannon_identity_report,
)
from omegalab.quantizer import Quantization, decomposition_report
from omegalab.renorm import CodelengthFn, convergence_gap, flow, log_chain


def instance_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


@dataclass(frozen=True)
class Layout:
    """Where atoms and segments sit; shared by a law and its length model."""

    atom_locs: tuple
    intervals: tuple


def random_layout(rng, min_segments=1, max_segments=3, max_atoms=3) -> Layout:
    n_seg = int(rng.integers(min_segments, max_segments + 1))
    n_atoms = int(rng.integers(0, max_atoms + 1))
    if n_seg + n_atoms == 0:
        n_atoms = 1
    kinds = ["seg"] * n_seg + ["atom"] * n_atoms
    rng.shuffle(kinds)
    cur = 1.0 + float(rng.uniform(0.0, 1.0))
    atoms, intervals = [], []
    for kind in kinds:
        if kind == "atom":
            cur += float(rng.uniform(0.1, 0.5))
            atoms.append(cur)
            cur += float(rng.uniform(0.1, 0.5))
        else:
            width = float(rng.uniform(2.0, 5.0))
            # half of the segments touch their left neighbour
            start = cur if rng.random() < 0.5 else cur + float(rng.uniform(0.1, 1.0))
            intervals.append((start, start + width))
            cur = start + width
            cur += float(rng.uniform(0.25, 1.0)) if rng.random() < 0.5 else 0.0
    return Layout(tuple(atoms), tuple(intervals))


def _random_segment(rng, a, b, weight, allow_grid=True):
    width = b - a
    kind = rng.choice(["const", "linear", "grid"] if allow_grid else ["const", "linear"])
    if kind == "const":
        return ConstSegment(a, b, weight / width)
    if kind == "linear":
        r = float(np.exp(rng.uniform(math.log(0.2), math.log(5.0))))
        u = 2.0 * weight / (width * (1.0 + r))
        return LinearSegment(a, b, u, r * u)
    # quadratic profile 1 + c t^2: Simpson and the not-a-knot spline are exact
    c = float(rng.uniform(-0.5, 2.0))
    t = np.linspace(0.0, 1.0, 9)
    vals = weight * (1.0 + c * t * t) / (width * (1.0 + c / 3.0))
    return GridSegment(a, b, tuple(vals))


def random_law(rng, layout: Layout | None = None, allow_grid=True) -> MixedLaw:
    """Random normalized law with every density value <= 1."""
    if layout is None:
        layout = random_layout(rng)
    n = len(layout.atom_locs) + len(layout.intervals)
    weights = rng.dirichlet(np.ones(n))
    atoms = tuple(Atom(w, float(p)) for w, p in zip(layout.atom_locs, weights))
    rest = weights[len(layout.atom_locs):]
    segs = tuple(_random_segment(rng, a, b, float(wt), allow_grid)
                 for (a, b), wt in zip(layout.intervals, rest))
    return MixedLaw(atoms, segs)


def random_feasible_lengths(rng, law: MixedLaw, max_slack=1.0) -> LengthAssignment:
    """Implied lengths of an independent law on the same layout, plus slack ``c >= 0``.

    The Kraft integral is ``e^-c <= 1``. The density part is handed over as
    a plain callable so the quadrature paths get exercised.
    """
    layout = Layout(tuple(at.w for at in law.atoms), tuple((s.a, s.b) for s in law.segments))
    other = random_law(rng, layout)
    base = implied_lengths(other)
    c = float(rng.uniform(0.0, max_slack))
    fn = None
    if law.segments:
        def fn(x, other=other, c=c):
            return -np.log(other.density(x)) + c
    return LengthAssignment(tuple(v + c for v in base.atom_lengths), fn, None)


def random_partition(rng, law: MixedLaw, max_cells=4) -> Quantization:
    """All atoms plus a random interval partition of every segment."""
    cells = []
    for seg in law.segments:
        k = int(rng.integers(1, max_cells + 1))
        cuts = np.sort(rng.uniform(seg.a, seg.b, size=k - 1))
        edges = [seg.a, *cuts.tolist(), seg.b]
        cells.extend(zip(edges, edges[1:]))
    return Quantization(tuple(at.w for at in law.atoms), tuple(cells))


def uniform_cells_instance(lo: float, n_cells: int, cell_width: float = 1.0):
    """Uniform density over ``n_cells`` equal cells from ``lo``; implied lengths."""
    hi = lo + n_cells * cell_width
    law = MixedLaw((), (ConstSegment(lo, hi, 1.0 / (hi - lo)),))
    cells = tuple((lo + j * cell_width, lo + (j + 1) * cell_width) for j in range(n_cells))
    return law, implied_lengths(law), Quantization((), cells)


def random_equality_instance(rng):
    """Piecewise-uniform density, cells equal to the pieces, implied lengths.

    Every equality condition holds: uniform per cell, ``K = 1``, ``q = pi``.
    """
    layout = random_layout(rng)
    n = len(layout.atom_locs) + len(layout.intervals)
    weights = rng.dirichlet(np.ones(n))
    atoms = tuple(Atom(w, float(p)) for w, p in zip(layout.atom_locs, weights))
    segs, cells = [], []
    for (a, b), wt in zip(layout.intervals, weights[len(layout.atom_locs):]):
        k = int(rng.integers(1, 4))
        cuts = np.sort(rng.uniform(a, b, size=k - 1))
        edges = [a, *cuts.tolist(), b]
        shares = rng.dirichlet(np.ones(k)) * float(wt)
        for (lo, hi), share in zip(zip(edges, edges[1:]), shares):
            segs.append(ConstSegment(lo, hi, float(share) / (hi - lo)))
            cells.append((lo, hi))
    law = MixedLaw(atoms, tuple(segs))
    return law, implied_lengths(law, allow_negative=True), Quantization(layout.atom_locs, tuple(cells))


# --- batch runners -----------------------------------------------------------

IDENTITY_COLUMNS = [
    "instance", "E_len", "H", "KL", "logK", "shannon_residual",
    "avg_len", "H_pi", "KL_pi_q", "logK_slack", "quantized_K", "H_p", "vol_term",
    "KL_rho_rhobar", "V_Q", "identity_a_residual", "identity_b_residual", "heisenberg_gap",
]


def identities_row(seed: int, index: int) -> dict:
    rng = instance_rng(seed, index)
    law = random_law(rng)
    lens = random_feasible_lengths(rng, law)
    q = random_partition(rng, law)
    sh = shannon_identity_report(law, lens)
    rep = decomposition_report(law, lens, q, full=True)
    return {
        "instance": index, "E_len": sh.E_len, "H": sh.H, "KL": sh.KL, "logK": sh.logK,
        "shannon_residual": sh.residual,
        "avg_len": rep.avg_len, "H_pi": rep.H_pi, "KL_pi_q": rep.KL_pi_q,
        "logK_slack": rep.logK_slack, "quantized_K": rep.K, "H_p": rep.H_p,
        "vol_term": rep.vol_term, "KL_rho_rhobar": rep.KL_rho_rhobar, "V_Q": rep.V_Q,
        "identity_a_residual": rep.identity_a_residual,
        "identity_b_residual": rep.identity_b_residual,
        "heisenberg_gap": rep.heisenberg_lhs - rep.heisenberg_rhs,
    }


FLOW_COLUMNS = ["instance", "init", "x", "depth", "tail", "flow_value", "ell_star", "gap", "f0_tail"]

_INITS = {
    "zero": CodelengthFn.zero(),
    "const3": CodelengthFn.constant(3.0),
    "square": CodelengthFn(lambda t: t * t, "square"),
}


def flow_row(seed: int, index: int) -> dict:
    rng = instance_rng(seed, index)
    name = ["zero", "const3", "square"][int(rng.integers(0, 3))]
    f0 = _INITS[name]
    x = float(np.exp(rng.uniform(0.0, math.log(1e300))))
    chain = log_chain(x)
    value = flow(f0, x, chain.depth)
    star = math.fsum(chain.terms)
    return {"instance": index, "init": name, "x": x, "depth": chain.depth, "tail": chain.tail,
            "flow_value": value, "ell_star": star, "gap": convergence_gap(f0, x),
            "f0_tail": f0(chain.tail)}


KRAFT_COLUMNS = ["K", "exact", "decimal", "gap", "brute_agrees"]


def kraft_row(seed: int, index: int) -> dict:
    K = index + 1
    s = partial_sum_beta_le(K)
    brute = ""
    if K <= 16:
        brute = str(brute_partial_sum((1 << K) - 1) == s).lower()
    return {"K": K, "exact": str(s), "decimal": s.decimal(20),
            "gap": str(completeness_gap(K)), "brute_agrees": brute}


SUITES = {
    "identities": (IDENTITY_COLUMNS, identities_row),
    "flow": (FLOW_COLUMNS, flow_row),
    "kraft": (KRAFT_COLUMNS, kraft_row),
}


def run_suite(name: str, seed: int, instances: int, workers: int = 1) -> tuple[list, list]:
    columns, row_fn = SUITES[name]
    if workers <= 1:
        rows = [row_fn(seed, i) for i in range(instances)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda i: row_fn(seed, i), range(instances)))
    return columns, rows
