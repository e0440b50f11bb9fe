import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flatcover.errors import DimensionMismatchError, ScalarModeError
from flatcover.geometry import (
    MODE_FLOAT,
    MODE_RATIONAL,
    AffineFlat,
    Hyperplane,
    PointRecord,
    WeightedPointCloud,
    canonicalize_flat,
    dist2_point_complement_form,
    dist2_point_flat,
    format_scalar,
    parse_scalar,
    total_cost,
)


def x_axis():
    return AffineFlat(2, 1, ((1.0, 0.0),), (0.0, 0.0), MODE_FLOAT)


def test_point_on_flat_has_zero_distance():
    f = x_axis()
    for t in (-3.0, 0.0, 7.5):
        assert dist2_point_flat((t, 0.0), f) <= 1e-18


def test_axis_aligned_distance():
    assert dist2_point_flat((5.0, 3.0), x_axis()) == pytest.approx(9.0, abs=1e-12)


def test_plane_distance_matches_normal_projection_oracle():
    # Plane z = x + y through the origin; normal n = (1, 1, -1).
    # Oracle: dist^2 = (n . x)^2 / |n|^2 = (1 + 1 - 5)^2 / 3 = 3.
    f = canonicalize_flat([(1.0, 0.0, 1.0), (0.0, 1.0, 1.0)], (0.0, 0.0, 0.0))
    assert dist2_point_flat((1.0, 1.0, 5.0), f) == pytest.approx(3.0, rel=1e-12)


def test_complement_form_trivial_cases():
    assert dist2_point_complement_form((5.0, 3.0), ((0.0, 1.0),), (0.0, 0.0)) == \
        pytest.approx(9.0, abs=1e-12)
    # Full identity complement (r = 0): plain squared distance to p.
    d2 = dist2_point_complement_form((3.0, 4.0), ((1.0, 0.0), (0.0, 1.0)), (1.0, 1.0))
    assert d2 == pytest.approx(13.0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_complement_form_agrees_with_primal(seed):
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=(3, 1))
    p = rng.normal(size=3)
    flat = canonicalize_flat(raw.T, p)
    B = flat.basis_array()
    # Complement via the eigenvectors of I - B B^T with unit eigenvalue.
    M = np.eye(3) - B @ B.T
    w, V = np.linalg.eigh(M)
    C = V[:, np.abs(w - 1.0) < 1e-9]
    x = rng.normal(size=3)
    lhs = dist2_point_flat(tuple(x), flat)
    rhs = dist2_point_complement_form(tuple(x), tuple(map(tuple, C.T)), flat.offset)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_canonicalize_simple():
    f = canonicalize_flat([(2.0, 0.0)], (7.0, 3.0))
    assert f.basis[0] == pytest.approx((1.0, 0.0))
    assert f.offset == pytest.approx((0.0, 3.0))


def test_canonicalize_idempotent():
    f = canonicalize_flat([(2.0, 0.0)], (7.0, 3.0))
    g = canonicalize_flat(f.basis, f.offset)
    assert np.allclose(g.basis, f.basis, atol=1e-15)
    assert np.allclose(g.offset, f.offset, atol=1e-15)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_canonicalize_preserves_membership(seed):
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=(4, 2)) * 3.0
    off = rng.normal(size=4) * 5.0
    flat = canonicalize_flat(raw.T, off)
    for _ in range(100):
        t = rng.normal(size=2)
        x = off + raw @ t
        assert dist2_point_flat(tuple(x), flat) <= 1e-18 * max(1.0, float(x @ x)) + 1e-18


def test_rational_mode_exactness():
    # 3-4-5 rotation keeps orthonormality exactly rational.
    f = AffineFlat(2, 1, ((Fraction(3, 5), Fraction(4, 5)),), (Fraction(0), Fraction(0)),
                   MODE_RATIONAL)
    d2 = dist2_point_flat((Fraction(4), Fraction(-3)), f)
    assert d2 == 25
    assert dist2_point_flat((Fraction(3), Fraction(4)), f) == 0


def test_rational_rebasis_is_exactly_invariant():
    # The same plane in R^3 under two rational orthonormal bases related by
    # a 3-4-5 rotation: distances agree exactly, not just to tolerance.
    e1 = (Fraction(3, 5), Fraction(4, 5), Fraction(0))
    e2 = (Fraction(0), Fraction(0), Fraction(1))
    mixed1 = tuple(Fraction(3, 5) * a - Fraction(4, 5) * b for a, b in zip(e1, e2))
    mixed2 = tuple(Fraction(4, 5) * a + Fraction(3, 5) * b for a, b in zip(e1, e2))
    p = (Fraction(0), Fraction(0), Fraction(0))
    fa = AffineFlat(3, 2, (e1, e2), p, MODE_RATIONAL)
    fb = AffineFlat(3, 2, (mixed1, mixed2), p, MODE_RATIONAL)
    for x in ((Fraction(1), Fraction(2), Fraction(3)),
              (Fraction(-7), Fraction(1, 3), Fraction(5))):
        assert dist2_point_flat(x, fa) == dist2_point_flat(x, fb)


def test_mode_mixing_is_an_error():
    f = x_axis()
    with pytest.raises(ScalarModeError):
        dist2_point_flat((Fraction(1), Fraction(2)), f)
    g = AffineFlat(2, 1, ((Fraction(1), Fraction(0)),), (Fraction(0), Fraction(0)),
                   MODE_RATIONAL)
    with pytest.raises(ScalarModeError):
        dist2_point_flat((1.0, 2.0), g)


def test_dimension_mismatch_is_an_error():
    with pytest.raises(DimensionMismatchError):
        dist2_point_flat((1.0, 2.0, 3.0), x_axis())


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_rebasis_invariance(seed):
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=(3, 2))
    off = rng.normal(size=3)
    flat = canonicalize_flat(raw.T, off)
    # Re-span the same flat with a rotated basis.
    Q, _ = np.linalg.qr(rng.normal(size=(2, 2)))
    B2 = flat.basis_array() @ Q
    flat2 = canonicalize_flat(B2.T, np.asarray(flat.offset))
    x = tuple(rng.normal(size=3))
    a = dist2_point_flat(x, flat)
    b = dist2_point_flat(x, flat2)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


def test_canonicalize_rational_mode_exact():
    f = canonicalize_flat([(Fraction(2), Fraction(0))], (Fraction(7), Fraction(3)),
                          mode=MODE_RATIONAL)
    assert f.basis == ((Fraction(1), Fraction(0)),)
    assert f.offset == (Fraction(0), Fraction(3))
    # 3-4-5 direction has an exact rational norm too.
    g = canonicalize_flat([(Fraction(3), Fraction(4))], (Fraction(0), Fraction(0)),
                          mode=MODE_RATIONAL)
    assert g.basis == ((Fraction(3, 5), Fraction(4, 5)),)


def test_canonicalize_rational_irrational_norm_errors():
    with pytest.raises(ScalarModeError):
        canonicalize_flat([(Fraction(1), Fraction(1))], (Fraction(0), Fraction(0)),
                          mode=MODE_RATIONAL)


def test_complement_form_rejects_non_orthonormal():
    from flatcover.errors import RankDeficiencyError
    with pytest.raises(RankDeficiencyError):
        dist2_point_complement_form((1.0, 2.0), ((2.0, 0.0),), (0.0, 0.0))


def test_total_cost_exact_for_axis_aligned_rational_flats():
    cloud = WeightedPointCloud.create([(0, 1), (0, 9)], MODE_RATIONAL, [3, 2])
    line0 = AffineFlat(2, 1, ((Fraction(1), Fraction(0)),),
                       (Fraction(0), Fraction(0)), MODE_RATIONAL)
    line10 = AffineFlat(2, 1, ((Fraction(1), Fraction(0)),),
                        (Fraction(0), Fraction(10)), MODE_RATIONAL)
    cost = total_cost(cloud, [line0, line10])
    assert cost == Fraction(5)
    assert isinstance(cost, Fraction)


def make_cloud(points, mults=None, mode=MODE_FLOAT):
    return WeightedPointCloud.create(points, mode, mults)


def test_total_cost_zero_when_covered():
    cloud = make_cloud([(0.0, 0.0), (1.0, 0.0), (5.0, 0.0)])
    assert total_cost(cloud, [x_axis()]) <= 1e-18


def test_total_cost_nearest_line_arithmetic():
    line0 = x_axis()
    line10 = AffineFlat(2, 1, ((1.0, 0.0),), (0.0, 10.0), MODE_FLOAT)
    cloud = make_cloud([(0.0, 1.0), (0.0, 9.0)], mults=[3, 2])
    assert total_cost(cloud, [line0, line10]) == pytest.approx(5.0, abs=1e-12)


def test_total_cost_matches_naive_loop_on_planted_instance():
    rng = np.random.default_rng(7)
    lines = [AffineFlat(2, 1, ((1.0, 0.0),), (0.0, float(y)), MODE_FLOAT)
             for y in (0.0, 4.0, 8.0)]
    pts = []
    for i in range(60):
        y = 4.0 * (i % 3) + rng.normal() * 0.3
        pts.append((rng.uniform(-5, 5), y))
    cloud = make_cloud(pts)
    naive = sum(min(dist2_point_flat(p, f) for f in lines) for p in pts)
    assert total_cost(cloud, lines) == pytest.approx(naive, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_total_cost_monotone_in_flats(seed):
    rng = np.random.default_rng(seed)
    cloud = make_cloud(rng.normal(size=(8, 2)) * 4)
    f1 = canonicalize_flat([tuple(rng.normal(size=2))], tuple(rng.normal(size=2)))
    f2 = canonicalize_flat([tuple(rng.normal(size=2))], tuple(rng.normal(size=2)))
    assert total_cost(cloud, [f1, f2]) <= total_cost(cloud, [f1]) + 1e-12


def test_total_cost_requires_flats():
    with pytest.raises(ValueError):
        total_cost(make_cloud([(0.0, 0.0)]), [])


def test_hyperplane_normalization():
    h = Hyperplane((Fraction(0), Fraction(-2), Fraction(2)))
    assert h.coeffs == (0, 1, -1)
    h2 = Hyperplane((Fraction(1, 2), Fraction(1, 3), Fraction(0)))
    assert h2.coeffs == (3, 2, 0)
    with pytest.raises(ValueError):
        Hyperplane((Fraction(1), Fraction(0), Fraction(0)))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.fractions(min_value=-9, max_value=9), min_size=3, max_size=5),
       st.fractions(min_value=Fraction(1, 7), max_value=7))
def test_hyperplane_normalize_scale_invariant(coeffs, scale):
    if all(c == 0 for c in coeffs[1:]):
        coeffs = list(coeffs)
        coeffs[1] = Fraction(1)
    a = Hyperplane(tuple(coeffs))
    b = Hyperplane(tuple(c * scale for c in coeffs))
    assert a.coeffs == b.coeffs
    first = next(c for c in a.coeffs[1:] if c != 0)
    assert first > 0
    assert math.gcd(*[abs(int(c)) for c in a.coeffs]) == 1


def test_scalar_roundtrip():
    assert parse_scalar("3/2", MODE_RATIONAL) == Fraction(3, 2)
    assert parse_scalar("-7", MODE_RATIONAL) == Fraction(-7)
    assert format_scalar(Fraction(3, 2)) == "3/2"
    assert format_scalar(Fraction(-7)) == "-7"
    assert parse_scalar(1.5, MODE_FLOAT) == 1.5
    with pytest.raises(ScalarModeError):
        parse_scalar(1.5, MODE_RATIONAL)


def test_cloud_total_weight_and_validation():
    cloud = make_cloud([(0.0, 0.0), (1.0, 2.0)], mults=[3, 2])
    assert cloud.total_weight == 5
    with pytest.raises(ValueError):
        PointRecord((1.0,), 0)
    with pytest.raises(DimensionMismatchError):
        WeightedPointCloud(2, MODE_FLOAT, (PointRecord((1.0,), 1),))
