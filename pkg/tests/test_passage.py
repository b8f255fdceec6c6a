from fractions import Fraction

import numpy as np
import pytest

from conftest import (
    enumerate_point_to_point,
    explicit_field,
    exponential_field,
    linear_3x3,
    random_int_field,
    uniform_field,
)
from lppkit.env import ParallelogramSpec, Vertex
from lppkit.passage import (
    BOTTOM,
    SetSpec,
    constrained_split_chain,
    constrained_weight,
    deserialize_value,
    max_weight_exceeding_tf,
    passage_profile,
    point_to_point,
    serialize_value,
    set_to_set,
    split_chain,
)
from lppkit import streaming


def test_point_to_point_examples():
    f = explicit_field([[1, 3], [2, 4]])
    assert point_to_point(f, Vertex(1, 1), Vertex(2, 2)) == 8.0
    assert point_to_point(f, Vertex(1, 1), Vertex(1, 1)) == 1.0
    assert point_to_point(f, Vertex(2, 2), Vertex(1, 1)) == BOTTOM
    assert point_to_point(linear_3x3(), Vertex(1, 1), Vertex(3, 3)) == 29.0


def test_point_to_point_oracle_small_fields(rng):
    for _ in range(200):
        nx, ny = rng.integers(1, 5, size=2)
        f = random_int_field(rng, int(nx), int(ny))
        u = Vertex(1, 1)
        v = Vertex(int(nx), int(ny))
        assert point_to_point(f, u, v) == enumerate_point_to_point(f, u, v)


def test_profile_examples_and_agreement(rng):
    f = explicit_field([[1, 3], [2, 4]])
    assert {v.as_tuple(): w for v, w in passage_profile(f, Vertex(1, 1), 4).items()} == {(2, 2): 8.0}
    assert passage_profile(f, Vertex(1, 1), 2) == {Vertex(1, 1): 1.0}
    fc = explicit_field([[1.0] * 6] * 6)
    prof = passage_profile(fc, Vertex(1, 1), 12)
    assert prof[Vertex(6, 6)] == 11.0  # 2r - 1 vertices on any corner path
    g = random_int_field(rng, 6, 6)
    for lev in (4, 7, 11):
        for v, w in passage_profile(g, Vertex(1, 1), lev).items():
            assert w == point_to_point(g, Vertex(1, 1), v)


def test_set_to_set_examples():
    f = explicit_field([[1, 3], [2, 4]])
    assert set_to_set(f, SetSpec.point(Vertex(1, 1)), SetSpec.point(Vertex(2, 2))) == 8.0
    A = SetSpec.vertices([Vertex(1, 1), Vertex(2, 1)])
    assert set_to_set(f, A, SetSpec.point(Vertex(2, 2))) == 8.0
    # no ordered pair
    assert set_to_set(f, SetSpec.point(Vertex(2, 1)), SetSpec.point(Vertex(1, 2))) == BOTTOM
    with pytest.raises(ValueError):
        set_to_set(f, SetSpec.interval(2, 10, 12), SetSpec.point(Vertex(2, 2)))


def test_set_monotonicity(rng):
    f = random_int_field(rng, 6, 6)
    A = SetSpec.interval(4, -2, 0)
    A_big = SetSpec.interval(4, -2, 2)
    B = SetSpec.interval(9, -1, 1)
    B_big = SetSpec.line(9)
    v1 = set_to_set(f, A, B)
    assert v1 <= set_to_set(f, A_big, B)
    assert v1 <= set_to_set(f, A, B_big)
    assert set_to_set(f, A_big, B_big) >= v1


def test_weight_monotonicity(rng):
    f = random_int_field(rng, 5, 5)
    base = point_to_point(f, Vertex(1, 1), Vertex(5, 5))
    for _ in range(20):
        x, y = rng.integers(1, 6, size=2)
        g = explicit_field(f.data.copy())
        g.data[x - 1, y - 1] += 3.0
        assert point_to_point(g, Vertex(1, 1), Vertex(5, 5)) >= base


def test_constrained_examples():
    f = linear_3x3()
    assert constrained_weight(f, ParallelogramSpec.from_width(3, 1, 0)) == 27.0
    assert constrained_weight(f, ParallelogramSpec.full_square(3)) == 29.0
    assert constrained_weight(f, ParallelogramSpec.from_width(3, 0, 0)) == BOTTOM
    with pytest.raises(ValueError):
        # endpoints outside a parallelogram that is too thin for its own slope
        constrained_weight(f, ParallelogramSpec(3, 1, Fraction(0)))


def test_constrained_vs_unconstrained_and_width_monotone(rng):
    r = 16
    for seed in range(25):
        f = exponential_field(seed, r)
        full = point_to_point(f, Vertex(1, 1), Vertex(r, r))
        prev = BOTTOM
        for ell in (Fraction(1, 2), 1, 2, None):
            U = (ParallelogramSpec.full_square(r) if ell is None
                 else ParallelogramSpec.from_ell(r, ell, 0))
            val = constrained_weight(f, U)
            assert val <= full
            assert val >= prev
            prev = val
        assert prev == full  # ell = 2 r^(1/3) contains the whole square


def test_split_chain_examples():
    f = explicit_field([[1.0] * 4] * 4)
    terms, total = split_chain(f, 4, 2)
    # blocks (1,1)->(2,2) and (3,2)->(4,4) under the printed (1,0) offset
    assert terms == [3.0, 4.0]
    assert total == 7.0
    assert total <= point_to_point(f, Vertex(1, 1), Vertex(4, 4))
    terms1, total1 = split_chain(f, 4, 1)
    assert len(terms1) == 1
    assert total1 == point_to_point(f, Vertex(1, 1), Vertex(4, 4))
    with pytest.raises(ValueError):
        split_chain(f, 4, 5)


def test_split_chain_superadditivity(rng):
    for seed in range(50):
        f = uniform_field(seed, 24)
        xr = point_to_point(f, Vertex(1, 1), Vertex(24, 24))
        for k in (1, 2, 3, 8):
            terms, total = split_chain(f, 24, k)
            assert len(terms) == k
            assert total <= xr
        assert split_chain(f, 24, 1)[1] == xr


def test_constrained_split_chain_subadditive(rng):
    for seed in range(20):
        r = 24
        f = exponential_field(seed, r)
        U = ParallelogramSpec.from_ell(r, 2, 0)
        full = constrained_weight(f, U)
        for k in (2, 3):
            terms, total = constrained_split_chain(f, U, k)
            assert len(terms) == k
            assert total <= full


def test_exceeding_tf_examples():
    f = linear_3x3()
    A, B = SetSpec.point(Vertex(1, 1)), SetSpec.point(Vertex(3, 3))
    # threshold 0: every path with >= 2 levels exits the center line
    assert max_weight_exceeding_tf(f, A, B, 0, 0) == 29.0
    # require max |x - y| >= 2, i.e. |t| > 1/2: optimum already touches (1,3)
    assert max_weight_exceeding_tf(f, A, B, Fraction(1, 2), 0) == 29.0
    # unreachable fluctuation
    assert max_weight_exceeding_tf(f, A, B, 100, 0) == BOTTOM


def test_exceeding_tf_consistency(rng):
    r = 12
    A, B = SetSpec.point(Vertex(1, 1)), SetSpec.point(Vertex(r, r))
    for seed in range(10):
        f = exponential_field(seed, r)
        s2s = set_to_set(f, A, B)
        prev = s2s
        for h in (0, Fraction(1, 2), 1, 2, 4):
            val = max_weight_exceeding_tf(f, A, B, h, 0)
            assert val <= s2s
            assert val <= prev  # nonincreasing in the halfwidth
            prev = val


def test_streaming_matches_stored_bitwise():
    from lppkit.env import DistributionSpec, WeightFieldSpec
    seed, r = 2024, 40
    spec = WeightFieldSpec(seed, DistributionSpec.exponential(1.0), r, r)
    stored = point_to_point(spec.materialize(), Vertex(1, 1), Vertex(r, r))
    streamed = streaming.batch_point_weights(
        np.uint64(seed), np.uint64(0), 1, r, 0, 1, 1.0, 0.0)[0]
    assert stored == streamed
    # profile agreement at an interior level, all offsets
    xs, prof = streaming.batch_profile(np.uint64(seed), np.uint64(0), 1, r, r,
                                       2 * r - 10, 1, 1.0, 0.0)
    stored_prof = passage_profile(spec.materialize(), Vertex(1, 1), 2 * r - 10)
    for i, x in enumerate(xs):
        v = Vertex(int(x), 2 * r - 10 - int(x))
        assert prof[0, i] == stored_prof[v]


def test_bottom_serialization():
    assert serialize_value(BOTTOM) == "-inf"
    assert deserialize_value("-inf") == BOTTOM
    assert serialize_value(1.5) == 1.5
    assert deserialize_value(1.5) == 1.5
