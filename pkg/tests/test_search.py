import numpy as np
import pytest

from cfet.search import ORDER5_FLOOR, residual_indices, search_positive_order5, weights


def test_weights_positive_simplex():
    rng = np.random.default_rng(0)
    for J in (1, 2, 5):
        b = weights(rng.normal(scale=30, size=J), J, 1e-6)
        assert np.all(b >= 1e-6 - 1e-18) and abs(b.sum() - 1) < 1e-14


def test_residual_indices_ladder():
    assert residual_indices(1) == [0]
    assert residual_indices(4) == [0, 1, 2, 3]
    assert residual_indices(5) == [0, 1, 2, 3, 4, 5]


def test_recovers_midpoint():
    rep = search_positive_order5(1, restarts=5, target_order=2)
    assert rep.best_norm < 1e-12
    assert rep.best_y[0] == pytest.approx(0.5, abs=1e-10)


def test_recovers_order4_two_exponentials():
    rep = search_positive_order5(2, restarts=10, target_order=4)
    assert rep.best_norm < 1e-10
    order = np.argsort(rep.best_y)
    np.testing.assert_allclose(np.array(rep.best_b)[order], [0.5, 0.5], atol=1e-8)
    np.testing.assert_allclose(np.array(rep.best_y)[order], [1 / 12, 5 / 12], atol=1e-8)


def test_order5_floor_small_run():
    rep = search_positive_order5(2, restarts=20, seed=3)
    assert rep.best_norm > ORDER5_FLOOR
    assert all(c["verdict"] == "infeasible" for c in rep.certificates)


def test_deterministic():
    a = search_positive_order5(2, restarts=4, seed=11)
    b = search_positive_order5(2, restarts=4, seed=11)
    assert a.to_json() == b.to_json()


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        search_positive_order5(0)
    with pytest.raises(ValueError):
        search_positive_order5(2, eps=0.6)
    with pytest.raises(ValueError):
        search_positive_order5(2, target_order=6)
