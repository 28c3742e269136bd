import numpy as np
import pytest

from filmfolio.madm import BestWorstPreference, InvalidPreferenceError, bwm_objective, solve_bwm
from oracles import bwm_grid_xi


def pref(a_best, a_worst, best=0, worst=None):
    worst = len(a_best) - 1 if worst is None else worst
    return BestWorstPreference("e", best, worst, a_best, a_worst)


def random_pref(rng, n):
    best, worst = rng.choice(n, size=2, replace=False)
    a_bw = int(rng.integers(1, 10))
    a_best = rng.integers(1, 10, size=n)
    a_worst = rng.integers(1, 10, size=n)
    a_best[best] = a_worst[worst] = 1
    a_best[worst] = a_worst[best] = a_bw
    return BestWorstPreference("e", int(best), int(worst), tuple(map(int, a_best)), tuple(map(int, a_worst)))


def test_symmetric_preferences():
    r = solve_bwm(pref((1, 1, 1), (1, 1, 1)))
    np.testing.assert_allclose(r.weights, [1 / 3] * 3, atol=1e-12)
    assert r.xi_star == 0 and r.consistent


def test_consistent_preferences():
    r = solve_bwm(pref((1, 2, 4), (4, 2, 1)))
    np.testing.assert_allclose(r.weights, [4 / 7, 2 / 7, 1 / 7], atol=1e-12)
    assert r.xi_star < 1e-8


def test_inconsistent_preferences_match_grid_search():
    p = pref((1, 3, 8), (8, 2, 1))
    r = solve_bwm(p)
    assert r.xi_star > 0.1 and not r.consistent
    assert r.xi_star == pytest.approx(bwm_grid_xi(p), abs=1e-3)
    assert bwm_objective(r.weights, p) == pytest.approx(r.xi_star, abs=1e-7)


@pytest.mark.parametrize("seed", range(40))
def test_xi_matches_grid_oracle(seed):
    rng = np.random.default_rng(seed)
    p = random_pref(rng, int(rng.integers(3, 5)))
    r = solve_bwm(p)
    assert r.xi_star == pytest.approx(bwm_grid_xi(p), abs=1e-3)
    assert r.weights.min() >= 0 and abs(r.weights.sum() - 1) <= 1e-9
    assert (r.xi_star <= 1e-6) == p.is_consistent()


@pytest.mark.parametrize("seed", range(30))
def test_relabeling_permutes_weights(seed):
    rng = np.random.default_rng(1000 + seed)
    n = int(rng.integers(3, 7))
    p = random_pref(rng, n)
    order = rng.permutation(n)
    a = solve_bwm(p)
    b = solve_bwm(p.permuted(order))
    np.testing.assert_allclose(b.weights, a.weights[order], atol=1e-9)
    assert b.xi_star == pytest.approx(a.xi_star, abs=1e-9)


@pytest.mark.parametrize("kwargs, msg", [
    (dict(best=0, worst=0, a_best=(1, 2, 4), a_worst=(4, 2, 1)), "same criterion"),
    (dict(best=0, worst=2, a_best=(2, 2, 4), a_worst=(4, 2, 1)), "a_best"),
    (dict(best=0, worst=2, a_best=(1, 2, 10), a_worst=(10, 2, 1)), r"\[1, 9\]"),
    (dict(best=0, worst=2, a_best=(1, 2, 4), a_worst=(5, 2, 1)), "a_worst"),
])
def test_invalid_preferences(kwargs, msg):
    with pytest.raises(InvalidPreferenceError, match=msg):
        BestWorstPreference("e", **kwargs)
