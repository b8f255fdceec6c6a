from fractions import Fraction

import pytest

from lppkit.env import (
    DistributionSpec,
    ParallelogramSpec,
    Vertex,
    WeightFieldSpec,
    parallelogram_contains,
    precedes,
)


def test_vertex_positivity():
    with pytest.raises(ValueError):
        Vertex(0, 1)
    with pytest.raises(ValueError):
        Vertex(1, -2)
    assert precedes(Vertex(1, 2), Vertex(3, 2))
    assert not precedes(Vertex(2, 2), Vertex(1, 5))


def test_distribution_validation():
    with pytest.raises(ValueError):
        DistributionSpec.geometric(1.5)
    with pytest.raises(ValueError):
        DistributionSpec.exponential(0.0)
    with pytest.raises(ValueError):
        DistributionSpec.uniform_int(5, 3)
    with pytest.raises(ValueError):
        DistributionSpec("cauchy", (1.0,))


def test_distribution_config_roundtrip():
    for d in [DistributionSpec.exponential(2.5), DistributionSpec.geometric(0.4),
              DistributionSpec.weibull(0.5, 1.0), DistributionSpec.constant(3.0),
              DistributionSpec.uniform_int(0, 9)]:
        assert DistributionSpec.from_config(d.to_config()) == d
    with pytest.raises(ValueError, match="q"):
        DistributionSpec.from_config({"kind": "geometric"})
    with pytest.raises(ValueError, match="scale"):
        DistributionSpec.from_config({"kind": "exponential", "rate": 1, "scale": 2})


def test_weight_at_bounds_error():
    spec = WeightFieldSpec(1, DistributionSpec.constant(7.0), 4, 4)
    assert spec.weight_at(Vertex(4, 4)) == 7.0
    with pytest.raises(ValueError):
        spec.weight_at(Vertex(5, 1))


def test_parallelogram_membership_invariant():
    # r=3, z=0, width w = ell r^(2/3) in lattice units; membership |t| <= w/2
    # with t = (x - y)/2.  (1,3) has t = -1: inside iff w >= 2 (boundary
    # included, per the printed non-strict inequality).
    U4 = ParallelogramSpec.from_width(3, 4, 0)
    U2 = ParallelogramSpec.from_width(3, 2, 0)
    U1 = ParallelogramSpec.from_width(3, 1, 0)
    v = Vertex(1, 3)
    assert parallelogram_contains(U4, v)
    assert parallelogram_contains(U2, v)       # boundary point
    assert not parallelogram_contains(U1, v)   # halfwidth 1/2 < |t| = 1
    # on-axis vertex has t = 0 for any width
    assert parallelogram_contains(ParallelogramSpec.from_width(3, 0, 0), Vertex(2, 2))
    # level constraint: (3,3) has x+y = 6 <= 2r, (4,3) has 7 > 6
    assert parallelogram_contains(U4, Vertex(3, 3))
    assert not parallelogram_contains(U4, Vertex(4, 3))


def test_membership_symmetry_at_z0(rng):
    U = ParallelogramSpec.from_ell(12, Fraction(3, 2), 0)
    for _ in range(200):
        a, b = rng.integers(1, 13, size=2)
        assert U.contains(Vertex(int(a), int(b))) == U.contains(Vertex(int(b), int(a)))


def test_midpoints_inside_when_wide_enough():
    for r, z in [(5, 0), (9, 3), (16, -5), (100, 37)]:
        U = ParallelogramSpec.from_width(r, 2, z)
        assert U.contains(U.start)
        assert U.contains(U.end)


def test_full_square_contains_square():
    r = 7
    U = ParallelogramSpec.full_square(r)
    for x in range(1, r + 1):
        for y in range(1, r + 1):
            assert U.contains(Vertex(x, y))


def test_membership_mask_matches_scalar():
    U = ParallelogramSpec.from_ell(6, Fraction(5, 4), 1)
    mask = U.membership_mask(1, 1, 5, 7)
    for i in range(5):
        for j in range(7):
            assert mask[i, j] == U.contains_xy(1 + i, 1 + j)


def test_membership_mask_bigint_path():
    # a width whose cube has a huge denominator forces the exact slow path
    U = ParallelogramSpec.from_ell(6, Fraction(10**10 + 1, 3 * 10**9), 0)
    mask = U.membership_mask(1, 1, 6, 6)
    for i in range(6):
        for j in range(6):
            assert mask[i, j] == U.contains_xy(1 + i, 1 + j)


def test_degenerate_slope_error():
    with pytest.raises(ValueError):
        ParallelogramSpec.from_width(3, 1, 3)


def test_width_monotone_masks():
    r = 10
    small = ParallelogramSpec.from_ell(r, 1, 0).membership_mask(1, 1, r, r)
    big = ParallelogramSpec.from_ell(r, 2, 0).membership_mask(1, 1, r, r)
    assert (big | small == big).all()
