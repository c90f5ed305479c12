import json
import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate

from omegalab.errors import LawValidationError, QuadratureFailure, ZeroMassRegion
from omegalab.mixedlaw import (
    Atom,
    ConstSegment,
    GridSegment,
    LengthAssignment,
    LinearSegment,
    MixedLaw,
    entropy,
    expected_length,
    implied_lengths,
    kraft_integral,
    law_from_dict,
    law_to_dict,
    shannon_identity_report,
    truncated_fixed_point,
)
from omegalab.suite import instance_rng, random_feasible_lengths, random_law

LN2 = math.log(2)

coin = MixedLaw((Atom(1, 0.5), Atom(2, 0.5)))
unit = MixedLaw((), (ConstSegment(1, 2, 1.0),))
half_half = MixedLaw((Atom(1, 0.5),), (ConstSegment(2, 3, 0.5),))
wide = MixedLaw((), (ConstSegment(1, 3, 0.5),))
ramp = MixedLaw((), (LinearSegment(1, 2, 0.0, 2.0),))

# mpmath at 30 digits, scripts/fixed_point_anchor.py
ANCHORS = {
    1e2: (2.4234226524603038142, -0.88518086015969125706),
    1e4: (2.7976543951254546616, -1.0287813500743802655),
    1e6: (2.9653825322519585629, -1.0870060400644282048),
}


@pytest.mark.parametrize("law, expected", [(coin, LN2), (unit, 0.0), (half_half, LN2)])
def test_entropy_examples(law, expected):
    assert entropy(law) == pytest.approx(expected, abs=1e-15)


def test_implied_lengths_examples():
    assert implied_lengths(MixedLaw((Atom(3, 1.0),))).atom_lengths == (0.0,)
    lens = implied_lengths(MixedLaw((Atom(1, 0.5), Atom(2, 0.25), Atom(3, 0.25))))
    assert lens.atom_lengths == pytest.approx((LN2, 2 * LN2, 2 * LN2))
    lens = implied_lengths(wide)
    assert lens.length_at([1.0, 2.5, 3.0]) == pytest.approx([LN2] * 3)
    assert kraft_integral(wide, lens) == pytest.approx(1.0, abs=1e-15)


def test_kraft_integral_examples():
    tri = MixedLaw((Atom(1, 0.5), Atom(2, 0.25), Atom(3, 0.25)))
    lens = implied_lengths(tri)
    assert kraft_integral(tri, lens) == pytest.approx(1.0, abs=1e-15)
    assert kraft_integral(tri, lens.shifted(LN2)) == pytest.approx(0.5, abs=1e-15)
    assert kraft_integral(coin, LengthAssignment((0.0, 0.0))) == 2.0


def test_kraft_integral_quadrature_path():
    lens = LengthAssignment((), lambda x: np.full_like(x, LN2))
    assert kraft_integral(wide, lens) == pytest.approx(1.0, abs=1e-13)
    assert expected_length(wide, lens) == pytest.approx(LN2, abs=1e-13)


def test_shannon_report_examples():
    rep = shannon_identity_report(half_half, implied_lengths(half_half))
    assert (rep.KL, rep.logK) == pytest.approx((0.0, 0.0), abs=1e-14)
    assert rep.E_len == pytest.approx(rep.H, abs=1e-14)
    rep = shannon_identity_report(half_half, implied_lengths(half_half).shifted(0.75))
    assert rep.E_len == pytest.approx(rep.H + 0.75)
    assert rep.KL == pytest.approx(0.0, abs=1e-14)
    assert -rep.logK == pytest.approx(0.75)
    rep = shannon_identity_report(coin, LengthAssignment((2 * LN2, 2 * LN2)))
    assert rep.K == pytest.approx(0.5)
    assert rep.E_len == pytest.approx(2 * LN2)
    assert rep.E_len == pytest.approx(rep.H + rep.KL - rep.logK)
    assert rep.KL == pytest.approx(0.0, abs=1e-15)


def test_ramp_closed_forms():
    # int_0^1 2t ln(2t) dt = ln 2 - 1/2
    assert entropy(ramp) == pytest.approx(0.5 - LN2, abs=1e-15)
    with pytest.raises(ValueError):
        implied_lengths(ramp)  # density reaches 2
    lens = implied_lengths(ramp, allow_negative=True)
    assert kraft_integral(ramp, lens) == pytest.approx(1.0)


def test_zero_mass_region():
    # 12 (t - 1/2)^2 touches zero mid-segment
    dip = MixedLaw((), (GridSegment(1, 2, (3.0, 0.75, 0.0, 0.75, 3.0)),))
    with pytest.raises(ZeroMassRegion):
        implied_lengths(dip, allow_negative=True)


def test_density_above_one_rejected_unless_allowed():
    narrow = MixedLaw((), (ConstSegment(1, 1.5, 2.0),))
    with pytest.raises(ValueError, match="negative implied lengths"):
        implied_lengths(narrow)
    lens = implied_lengths(narrow, allow_negative=True)
    assert lens.length_at(1.2) == pytest.approx(-LN2)


def test_coarse_grid_fails_quadrature():
    t = np.linspace(0, 1, 5)
    vals = np.exp(8 * t)
    vals = vals / ((math.exp(8) - 1) / 8)
    seg = GridSegment(1, 2, tuple(vals))
    with pytest.raises(QuadratureFailure):
        seg.mass()


def test_grid_matches_scipy_for_smooth_samples():
    t = np.linspace(0, 1, 33)
    seg = GridSegment(1, 2, tuple(1 + 0.5 * t**2))
    oracle, _ = sp_integrate.quad(lambda x: 1 + 0.5 * (x - 1) ** 2, 1, 2, epsabs=1e-14)
    assert seg.mass() == pytest.approx(oracle, abs=1e-12)
    ref, _ = sp_integrate.quad(lambda x: (1 + 0.5 * (x - 1) ** 2) * math.log(1 + 0.5 * (x - 1) ** 2),
                               1, 2, epsabs=1e-14)
    assert seg.xlogx() == pytest.approx(ref, abs=1e-10)


def test_validation_collects_paths():
    with pytest.raises(LawValidationError) as info:
        law_from_dict({
            "atoms": [{"w": 1, "p": 0.2}, {"w": 2, "p": "x"}],
            "segments": [{"kind": "wedge", "a": 3, "b": 4}, {"kind": "const", "a": 5}],
            "colour": "blue",
        })
    paths = [p for p, _ in info.value.violations]
    assert "atoms[1].p" in paths
    assert "segments[0].kind" in paths
    assert "segments[1].b" in paths and "segments[1].rho" in paths
    assert "colour" in paths


def test_validation_semantic_paths():
    with pytest.raises(LawValidationError) as info:
        law_from_dict({"atoms": [{"w": 0.5, "p": 0.5}, {"w": 2, "p": -0.1}]})
    paths = [p for p, _ in info.value.violations]
    assert paths == ["atoms[0].w", "atoms[1].p"]


def test_validation_mass_and_overlap():
    with pytest.raises(LawValidationError, match="total mass"):
        MixedLaw((Atom(1, 0.5),))
    with pytest.raises(LawValidationError) as info:
        MixedLaw((Atom(1.5, 0.5),), (ConstSegment(1, 2, 0.25), ConstSegment(1.5, 2.5, 0.5)))
    text = str(info.value.violations)
    assert "inside" in text and "overlaps" in text


def test_law_dict_round_trip():
    law = MixedLaw((Atom(1, 0.25),), (
        LinearSegment(2, 3, 0.1, 0.3),
        GridSegment(3, 4, tuple(0.55 * np.ones(5))),
    ))
    again = law_from_dict(json.loads(json.dumps(law_to_dict(law))))
    assert law_to_dict(again) == law_to_dict(law)
    assert entropy(again) == pytest.approx(entropy(law))


def _quad_oracle(law, fn):
    return math.fsum(sp_integrate.quad(lambda x: float(fn(x)), s.a, s.b, epsabs=1e-13,
                                       epsrel=1e-13, limit=200)[0] for s in law.segments)


@pytest.mark.parametrize("index", range(12))
def test_general_lengths_against_scipy(index):
    rng = instance_rng(99, index)
    law = random_law(rng, allow_grid=False)
    lens = random_feasible_lengths(rng, law)
    K = kraft_integral(law, lens)
    oracle = math.fsum(math.exp(-v) for v in lens.atom_lengths)
    if law.segments:
        oracle += _quad_oracle(law, lambda x: np.exp(-lens.length_at(x)))
    assert K == pytest.approx(oracle, abs=1e-10)
    assert K <= 1 + 1e-9
    rep = shannon_identity_report(law, lens)
    assert abs(rep.residual) <= 1e-10
    assert rep.KL >= -1e-10


@pytest.mark.parametrize("index", range(30))
def test_implied_lengths_saturate(index):
    law = random_law(instance_rng(5, index))
    lens = implied_lengths(law)
    assert kraft_integral(law, lens) == pytest.approx(1.0, abs=1e-9)
    assert expected_length(law, lens) == pytest.approx(entropy(law), abs=1e-8)


@pytest.mark.parametrize("X", sorted(ANCHORS))
def test_truncated_fixed_point_anchors(X):
    K, excess = ANCHORS[X]
    t = truncated_fixed_point(X)
    assert t.K == pytest.approx(K, rel=1e-10)
    assert t.excess == pytest.approx(excess, abs=1e-9)
    assert t.excess == pytest.approx(-math.log(t.K), abs=1e-10)
    # closed form for e^e <= X <= e^(e^e)
    assert t.K == pytest.approx(2 + math.log(math.log(math.log(X))), rel=1e-10)
