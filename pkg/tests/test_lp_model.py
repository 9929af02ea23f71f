"""Discrete weighted-sequence model: closed forms against the ascent oracle."""

import numpy as np
import pytest

from qstarlab import (BadExponent, BadMeasure, DiscreteLpAlgebra, ZeroFunction,
                      ball_lower_seminorm_nonneg, conjugate_index, holder_sup,
                      lp_bounded_norm, weight_ascent_oracle)

CASES = [
    (2.0, [0.5, 0.5], [1.0, 2.0]),
    (2.5, [0.2, 0.8], [3.0, -1.0]),
    (3.0, [0.3, 0.3, 0.4], [1.0, 0.5, 2.0]),
    (4.0, [0.5, 0.5], [1.0, 2.0]),
    (4.0, [0.1, 0.2, 0.3, 0.4], [0.5, 1.5, -2.5, 1.0]),
    (6.0, [0.25, 0.25, 0.25, 0.25], [1.0, 1.0, 1.0, 4.0]),
]


def test_conjugate_index_values():
    assert conjugate_index(2.0) == float("inf")
    assert conjugate_index(4.0) == pytest.approx(2.0)
    assert conjugate_index(3.0) == pytest.approx(3.0)
    assert conjugate_index(6.0) == pytest.approx(1.5)
    with pytest.raises(BadExponent):
        conjugate_index(1.9)


def test_frozen_reference_value():
    # p = 4, equal masses, f = (1, 2): the supremum is sqrt(8.5) exactly
    out = holder_sup([1.0, 2.0], 4.0, [0.5, 0.5])
    assert out["sup"] == pytest.approx(np.sqrt(8.5), abs=1e-10)
    assert out["seminorm"] == pytest.approx(8.5 ** 0.25, abs=1e-10)


def test_sup_is_squared_norm():
    for p, m, f in CASES:
        out = holder_sup(f, p, m)
        lp = float(np.sum(np.asarray(m) * np.abs(f) ** p)) ** (1.0 / p)
        assert out["sup"] == pytest.approx(lp ** 2, rel=1e-12)


def test_extremal_weight_is_feasible_and_attains():
    for p, m, f in CASES:
        out = holder_sup(f, p, m)
        w = out["extremal_weight"]
        assert np.all(w >= -1e-15)
        assert out["weight_ball_norm"] <= 1.0 + 1e-9
        assert out["attained"] == pytest.approx(out["sup"], rel=1e-10)


def test_quadratic_exponent_weight_is_flat():
    out = holder_sup([1.0, 2.0], 2.0, [0.5, 0.5])
    assert np.allclose(out["extremal_weight"], 1.0)
    assert out["sup"] == pytest.approx(2.5)


def test_oracle_matches_closed_form():
    # the oracle climbs the constraint sphere with no analytic shortcut,
    # so agreement pins the closed form from below
    for p, m, f in CASES:
        out = holder_sup(f, p, m)
        orc = weight_ascent_oracle(f, p, m)
        assert orc["sup_estimate"] <= out["sup"] * (1.0 + 1e-9)
        assert orc["sup_estimate"] == pytest.approx(out["sup"], rel=1e-6)


def test_oracle_deterministic():
    a = weight_ascent_oracle([1.0, -2.0, 0.5], 3.0, [0.3, 0.3, 0.4])
    b = weight_ascent_oracle([1.0, -2.0, 0.5], 3.0, [0.3, 0.3, 0.4])
    assert a["sup_estimate"] == b["sup_estimate"]
    assert np.array_equal(a["weight"], b["weight"])


def test_bounded_norm_routes_agree():
    for p, m, f in CASES:
        out = lp_bounded_norm(f, p, m)
        assert out["analytic"] == pytest.approx(np.abs(f).max())
        assert out["agrees"], out


def test_ball_lower_closed_form():
    f = [1.0, 2.0, 0.5]
    m = [0.2, 0.5, 0.3]
    for p in (2.0, 3.0, 4.0, 6.0):
        got = ball_lower_seminorm_nonneg(f, p, m)
        half = p / 2.0
        expect = float(np.sum(np.asarray(m) * np.asarray(f) ** half)) ** (1.0 / half)
        assert got == pytest.approx(expect, rel=1e-12)
        # cross-check: the same supremum reached through the quadratic
        # problem for the pointwise square root
        via_square = holder_sup(np.sqrt(f), p, m)["sup"]
        assert got == pytest.approx(via_square, rel=1e-10)


def test_ball_lower_requires_nonnegative():
    with pytest.raises(BadMeasure):
        ball_lower_seminorm_nonneg([1.0, -1.0], 4.0, [0.5, 0.5])


def test_algebra_element_round_trip():
    lp = DiscreteLpAlgebra.build([0.25, 0.25, 0.5])
    f = [1.0 + 1.0j, -2.0, 0.0]
    assert np.allclose(lp.values(lp.element(f)), f)


def test_weight_form_evaluation():
    lp = DiscreteLpAlgebra.build([0.5, 0.5])
    w = [0.3, 1.7]
    phi = lp.weight_form(w)
    a, b = lp.element([1.0, 2.0]), lp.element([1.0 - 1.0j, 0.5])
    expect = sum(mm * ww * fa * np.conj(fb)
                 for mm, ww, fa, fb in zip(lp.masses, w, [1.0, 2.0],
                                           [1.0 - 1.0j, 0.5]))
    assert phi.eval(a, b) == pytest.approx(expect, abs=1e-12)


def test_point_family_is_unbalanced():
    lp = DiscreteLpAlgebra.build([0.5, 0.5])
    fam = lp.point_family(4.0)
    assert not fam.balanced
    assert len(fam.seeds) == 2


def test_error_paths():
    with pytest.raises(BadExponent):
        holder_sup([1.0], 1.5, [1.0])
    with pytest.raises(ZeroFunction):
        holder_sup([0.0, 0.0], 4.0, [0.5, 0.5])
    with pytest.raises(BadMeasure):
        DiscreteLpAlgebra.build([0.5, -0.5])
    with pytest.raises(BadMeasure):
        DiscreteLpAlgebra.build([])
