import pytest

from conftest import explicit_field, linear_3x3, random_int_field, uniform_field
from lppkit.env import Vertex
from lppkit.passage import point_to_point
from lppkit.watermelon import (
    FREE,
    PINNED,
    BruteForceSizeError,
    brute_force_disjoint,
    watermelon_totals,
    watermelon_weight,
)


def test_pinned_3x3_example():
    res = watermelon_weight(linear_3x3(), 3, 2, PINNED)
    assert res.total_weight == 42.0
    assert len(res.paths) == 2
    starts = sorted(p.start.as_tuple() for p in res.paths)
    ends = sorted(p.end.as_tuple() for p in res.paths)
    assert starts == [(1, 1), (1, 2)]
    assert ends == [(3, 2), (3, 3)]


def test_free_3x3_example():
    assert watermelon_weight(linear_3x3(), 3, 2, FREE).total_weight == 42.0


def test_k1_identity_and_monotonicity(rng):
    for seed in range(10):
        f = uniform_field(seed, 6)
        res1 = watermelon_weight(f, 6, 1, FREE)
        assert res1.total_weight == point_to_point(f, Vertex(1, 1), Vertex(6, 6))
        totals = watermelon_totals(f, 6, 5)
        for k in range(2, 6):
            assert totals[k] >= totals[k - 1]
        assert totals[5] <= f.data.sum()  # upper bound by the whole mass


def test_2x2_constant_free_k2():
    f = explicit_field([[1.0, 1.0], [1.0, 1.0]])
    assert brute_force_disjoint(f, 2, 2, FREE) == 4.0
    assert watermelon_weight(f, 2, 2, FREE).total_weight == 4.0


def test_oracle_equivalence_small(rng):
    for i in range(30):
        r = int(rng.integers(2, 6))
        f = random_int_field(rng, r, r)
        for k in (1, 2):
            for mode in (FREE, PINNED):
                if k > r:
                    continue
                assert watermelon_weight(f, r, k, mode).total_weight == \
                    brute_force_disjoint(f, r, k, mode)


def test_disjointness_certificate(rng):
    f = random_int_field(rng, 8, 8)
    res = watermelon_weight(f, 8, 4, FREE)
    seen = set()
    for p in res.paths:
        for v in p:
            assert v not in seen
            seen.add(v)
    assert res.total_weight == pytest.approx(
        sum(f.path_weight(p) for p in res.paths), rel=1e-12)


def test_mode_and_size_errors():
    f = uniform_field(0, 4)
    with pytest.raises(ValueError):
        watermelon_weight(f, 4, 5, PINNED)  # k > r
    with pytest.raises(ValueError):
        watermelon_weight(f, 4, 2, "diagonal")
    with pytest.raises(BruteForceSizeError):
        brute_force_disjoint(uniform_field(0, 6), 6, 2, FREE)
    with pytest.raises(BruteForceSizeError):
        brute_force_disjoint(f, 4, 3, FREE)


def test_result_json():
    import json
    res = watermelon_weight(linear_3x3(), 3, 2, PINNED)
    d = json.loads(res.to_json())
    assert d["total_weight"] == 42.0
    assert d["mode"] == PINNED
    assert len(d["paths"]) == 2
    assert all(isinstance(v, list) and len(v) == 2 for p in d["paths"] for v in p)


def test_pinned_row_extremes():
    # k = r: the pinned family forces the r disjoint "rows" along antidiagonals
    f = uniform_field(3, 3)
    res = watermelon_weight(f, 3, 3, PINNED)
    assert res.total_weight == pytest.approx(float(f.data.sum()))
