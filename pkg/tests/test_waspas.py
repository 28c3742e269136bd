import numpy as np
import pytest

from filmfolio.madm import (
    BENEFICIAL,
    NON_BENEFICIAL,
    CriterionSpec,
    DecisionMatrix,
    InvalidMatrixError,
    normalize_matrix,
    score_waspas,
    wpm,
    wsm,
)
from filmfolio.madm.waspas import RELATIVE_SD, renormalize_beneficial


def matrix(values, directions=None, normalized=False):
    values = np.asarray(values, dtype=float)
    m, n = values.shape
    directions = directions or [BENEFICIAL] * n
    crit = tuple(CriterionSpec(f"c{j + 1}", direction=d) for j, d in enumerate(directions))
    return DecisionMatrix(tuple(f"a{i + 1}" for i in range(m)), crit, values, normalized)


def random_case(rng, integer=False):
    m, n = int(rng.integers(2, 9)), int(rng.integers(1, 7))
    if integer:
        values = rng.integers(1, 1000, size=(m, n)).astype(float)
    else:
        values = rng.uniform(0.01, 100, size=(m, n))
    dirs = [BENEFICIAL if b else NON_BENEFICIAL for b in rng.random(n) < 0.6]
    w = rng.dirichlet(np.ones(n))
    return matrix(values, dirs), w


def test_normalize_examples():
    assert normalize_matrix(matrix([[5], [5], [5]])).values.ravel().tolist() == [1, 1, 1]
    assert normalize_matrix(matrix([[2], [4], [8]])).values.ravel().tolist() == [0.25, 0.5, 1]
    assert normalize_matrix(matrix([[2], [4], [8]], [NON_BENEFICIAL])).values.ravel().tolist() == [1, 0.5, 0.25]


def test_min_normalization_variant_divides_by_min():
    m = normalize_matrix(matrix([[2], [4], [8]]), mode="paper")
    assert m.values.ravel().tolist() == [1, 2, 4]
    assert not m.normalized


@pytest.mark.parametrize("seed", range(20))
def test_normalize_idempotent(seed):
    m, _ = random_case(np.random.default_rng(seed))
    once = normalize_matrix(m)
    assert np.all(once.values.max(axis=0) == 1.0)
    again = renormalize_beneficial(once)
    assert np.array_equal(again.values, once.values)


def test_all_ones_is_a_complete_tie():
    res = score_waspas(matrix(np.ones((4, 3)), normalized=True), [0.2, 0.3, 0.5])
    for arr in (res.q1, res.q2, res.q):
        np.testing.assert_array_equal(arr, 1.0)
    assert res.ranking == (0, 1, 2, 3)


def test_two_by_two_fixed_lambda():
    res = score_waspas(matrix([[1, 1], [0.25, 1]], normalized=True), [0.5, 0.5], lam=0.5)
    np.testing.assert_allclose(res.q1, [1, 0.625])
    np.testing.assert_allclose(res.q2, [1, 0.5])
    np.testing.assert_allclose(res.q, [1, 0.5625])
    assert res.ranked_labels() == ["a1", "a2"]


def _fd_lambda(xbar, w, h=1e-6):
    m, n = xbar.shape
    var_x = (RELATIVE_SD * xbar) ** 2
    out = []
    for i in range(m):
        g1 = np.empty(n)
        g2 = np.empty(n)
        for j in range(n):
            up, dn = xbar[i].copy(), xbar[i].copy()
            up[j] += h
            dn[j] -= h
            g1[j] = (up @ w - dn @ w) / (2 * h)
            g2[j] = (np.prod(up ** w) - np.prod(dn ** w)) / (2 * h)
        v1, v2 = (g1**2 * var_x[i]).sum(), (g2**2 * var_x[i]).sum()
        out.append(v2 / (v1 + v2))
    return np.array(out)


def test_optimal_lambda_matches_finite_differences():
    xbar = np.array([[1, 1], [0.25, 1]], dtype=float)
    res = score_waspas(matrix(xbar, normalized=True), [0.5, 0.5])
    np.testing.assert_allclose(res.lam, _fd_lambda(xbar, np.array([0.5, 0.5])), atol=1e-6)


@pytest.mark.parametrize("seed", range(10))
def test_optimal_lambda_random(seed):
    rng = np.random.default_rng(50 + seed)
    m, w = random_case(rng)
    res = score_waspas(m, w)
    np.testing.assert_allclose(res.lam, _fd_lambda(normalize_matrix(m).values, w), atol=1e-6)
    assert np.all((res.lam >= 0) & (res.lam <= 1))
    assert np.all(res.q <= res.q1 + 1e-15) and np.all(res.q >= res.q2 - 1e-15)


def test_wpm_never_exceeds_wsm():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        m, w = random_case(rng)
        res = score_waspas(m, w)
        assert np.all(res.q2 <= res.q1 + 1e-12)


def test_lambda_extremes_reduce_exactly():
    rng = np.random.default_rng(8)
    for _ in range(200):
        m, w = random_case(rng)
        xbar = normalize_matrix(m).values
        assert np.array_equal(score_waspas(m, w, lam=1.0).q, wsm(xbar, w))
        assert np.array_equal(score_waspas(m, w, lam=0.0).q, wpm(xbar, w))


@pytest.mark.parametrize("seed", range(30))
def test_column_scaling_invariance(seed):
    rng = np.random.default_rng(90 + seed)
    m, w = random_case(rng, integer=True)
    base = score_waspas(m, w)
    j = int(rng.integers(m.shape[1]))
    for c in (float(rng.integers(2, 50)), 0.125, 1024.0):
        vals = m.values.copy()
        vals[:, j] *= c
        scaled = score_waspas(DecisionMatrix(m.alternatives, m.criteria, vals), w)
        assert np.array_equal(scaled.q, base.q)
        assert scaled.ranking == base.ranking


def test_ties_follow_row_order():
    res = score_waspas(matrix([[1, 2], [2, 1], [1, 2]]), [0.5, 0.5], lam=0.5)
    assert res.ranking == (0, 1, 2)


@pytest.mark.parametrize("w, err", [([0.5, 0.3, 0.2], InvalidMatrixError), ([0.7, 0.7], InvalidMatrixError)])
def test_bad_weights(w, err):
    with pytest.raises(err):
        score_waspas(matrix([[1, 2], [2, 1]]), w)


def test_bad_lambda():
    with pytest.raises(ValueError):
        score_waspas(matrix([[1, 2], [2, 1]]), [0.5, 0.5], lam=1.5)


def test_matrix_invariants():
    with pytest.raises(InvalidMatrixError):
        matrix([[1, 0], [2, 1]])
    with pytest.raises(InvalidMatrixError):
        matrix([[1, 1.5]], normalized=True)
    with pytest.raises(InvalidMatrixError):
        CriterionSpec("c", categorical_map={"G": 11})
