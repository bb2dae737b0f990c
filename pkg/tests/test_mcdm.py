import numpy as np
import pytest

from mcselect.mcdm import (CriterionSpec, DecisionMatrix, Direction,
                           normalize_matrix, pareto_filter, topsis_rank)
from reference_impls import brute_force_pareto, reference_topsis_closeness

MAX = Direction.MAXIMIZE
MIN = Direction.MINIMIZE


def matrix(values, directions, weights=None):
    n = len(directions)
    weights = weights or [1.0] * n
    criteria = [CriterionSpec(f"c{j}", d, w)
                for j, (d, w) in enumerate(zip(directions, weights))]
    return DecisionMatrix(alternatives=list(range(len(values))),
                          values=np.asarray(values, float), criteria=criteria)


def test_normalize_three_four_five():
    m = matrix([[3.0], [4.0]], [MAX])
    weighted, zero = normalize_matrix(m)
    assert weighted[:, 0] == pytest.approx([0.6, 0.8])
    assert zero == []


def test_normalize_scale_cancels():
    m1 = matrix([[1.0, 2.0], [3.0, 4.0]], [MAX, MIN])
    m2 = matrix([[7.0, 2.0], [21.0, 4.0]], [MAX, MIN])
    w1, _ = normalize_matrix(m1)
    w2, _ = normalize_matrix(m2)
    assert w1 == pytest.approx(w2)


def test_normalize_zero_column_flagged():
    m = matrix([[0.0, 1.0], [0.0, 2.0]], [MAX, MAX])
    weighted, zero = normalize_matrix(m)
    assert zero == [0]
    assert np.all(weighted[:, 0] == 0.0)


def test_topsis_extremes():
    m = matrix([[1.0, 5.0], [0.0, 1.0]], [MAX, MAX])
    res = topsis_rank(m)
    assert res.closeness == pytest.approx([1.0, 0.0])


def test_topsis_symmetric_alternatives():
    m = matrix([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], [MAX, MAX])
    res = topsis_rank(m)
    assert res.closeness[2] == pytest.approx(1.0)
    assert res.closeness[0] == pytest.approx(res.closeness[1])


def test_topsis_matches_frozen_hand_computation():
    # 3-alternative accuracy/neurons case; values frozen from the
    # step-by-step reference arithmetic in reference_impls
    m = matrix([[0.90, 10.0], [0.80, 2.0], [0.85, 5.0]], [MAX, MIN])
    res = topsis_rank(m)
    expected = [0.08785912863058033, 0.9121408713694197, 0.6237758597467782]
    assert res.closeness == pytest.approx(expected, abs=1e-12)
    assert res.ordering == [1, 2, 0]
    oracle = reference_topsis_closeness(m.values, ["max", "min"])
    assert res.closeness == pytest.approx(oracle, abs=1e-12)


def test_topsis_identical_alternatives_closeness_half():
    m = matrix([[2.0, 3.0]] * 4, [MAX, MIN])
    assert topsis_rank(m).closeness == pytest.approx([0.5] * 4)


def test_topsis_rejects_non_finite():
    with pytest.raises(ValueError):
        matrix([[np.nan, 1.0]], [MAX, MAX])


def test_pareto_simple():
    m = matrix([[2.0, 2.0], [1.0, 1.0], [1.5, 3.0]], [MAX, MAX])
    assert pareto_filter(m) == {0, 2}


def test_pareto_identical_rows_all_retained():
    m = matrix([[1.0, 2.0]] * 3, [MAX, MIN])
    assert pareto_filter(m) == {0, 1, 2}


def test_pareto_matches_brute_force():
    rng = np.random.default_rng(0)
    for trial in range(20):
        pts = rng.random((20, 2))
        m = matrix(pts, [MAX, MAX])
        assert pareto_filter(m) == brute_force_pareto(pts, ["max", "max"])


def test_dominance_implies_closeness_order():
    rng = np.random.default_rng(1)
    for trial in range(30):
        vals = rng.random((8, 3))
        dirs = [MAX, MIN, MAX]
        m = matrix(vals, dirs)
        res = topsis_rank(m)
        keep = brute_force_pareto(vals, ["max", "min", "max"])
        sign = np.array([1, -1, 1])
        v = vals * sign
        for i in range(8):
            for j in range(8):
                if i != j and np.all(v[i] >= v[j]) and np.any(v[i] > v[j]):
                    assert res.closeness[i] >= res.closeness[j] - 1e-12


def test_column_scaling_preserves_ordering_and_front():
    rng = np.random.default_rng(2)
    for trial in range(30):
        vals = rng.random((10, 3)) + 0.1
        dirs = [MAX, MIN, MAX]
        scale = rng.uniform(0.1, 10.0, size=3)
        m1 = matrix(vals, dirs)
        m2 = matrix(vals * scale, dirs)
        assert topsis_rank(m1).ordering == topsis_rank(m2).ordering
        assert pareto_filter(m1) == pareto_filter(m2)


def test_direction_duality():
    rng = np.random.default_rng(3)
    vals = rng.random((12, 2))
    m1 = matrix(vals, [MAX, MAX])
    flipped = vals.copy()
    flipped[:, 1] = -flipped[:, 1]
    m2 = matrix(flipped, [MAX, MIN])
    assert topsis_rank(m1).ordering == topsis_rank(m2).ordering


def test_pareto_output_internally_non_dominated():
    rng = np.random.default_rng(4)
    vals = rng.integers(0, 4, size=(30, 2)).astype(float)
    m = matrix(vals, [MAX, MAX])
    keep = sorted(pareto_filter(m))
    for i in keep:
        for j in keep:
            if i != j:
                assert not (np.all(vals[j] >= vals[i]) and np.any(vals[j] > vals[i]))
