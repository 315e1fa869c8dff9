import random
from fractions import Fraction as F

import pytest

from cfet.conditions import order_achieved, quadric_residuals, quadric_system, residuals_order5
from cfet.scheme import bundled_scheme, derive_coefficients, derive_from_by


def residuals(name):
    return residuals_order5(derive_coefficients(bundled_scheme(name)))


def test_midpoint_residuals():
    r = residuals("midpoint")
    assert (r.r_sum_b, r.r_sum_y, r.r_bhat_y) == (0, 0, F(-1, 12))
    assert r.exact


def test_cf4_residuals():
    r = residuals("cf4")
    assert max(abs(v) for v in (r.r_sum_b, r.r_sum_y, r.r_bhat_y, r.r_bhat2)) <= 1e-12
    assert r.r_bhat3 == pytest.approx(-1 / 480, abs=1e-12)
    assert r.r_quad == pytest.approx(1 / 1080, abs=1e-12)


def test_cf4_exact_by():
    r = residuals_order5(derive_from_by([F(1, 2), F(1, 2)], [F(1, 12), F(5, 12)]))
    assert r.as_tuple() == (0, 0, 0, 0, F(-1, 480), F(1, 1080))


def test_zero_scheme():
    r = residuals_order5(derive_from_by([0, 0], [0, 0]))
    assert r.r_sum_b == -1 and r.r_quad == F(-1, 20)


@pytest.mark.parametrize("name, tol, p", [("midpoint", 0, 2), ("cf4", 1e-12, 4), ("left-endpoint", 0, 1), ("negative-demo", 0, 2)])
def test_order_achieved(name, tol, p):
    assert order_achieved(derive_coefficients(bundled_scheme(name)), tol) == p


def test_order_zero():
    assert order_achieved(derive_from_by([F(1, 2)], [0])) == 0


def test_left_endpoint_r_sum_y():
    assert residuals("left-endpoint").r_sum_y == F(-1, 2)


def test_quadric_midpoint():
    assert quadric_residuals(derive_coefficients(bundled_scheme("midpoint"))) == (0, F(-3, 40), F(1, 30))


def test_quadric_zero_y():
    assert quadric_residuals(derive_from_by([F(1, 3), F(2, 3)], [0, 0])) == (F(-1, 2), F(-1, 5), F(-1, 20))


def test_quadric_cf4_matches():
    dc = derive_coefficients(bundled_scheme("cf4"))
    r = residuals_order5(dc)
    q = quadric_residuals(dc)
    assert q == pytest.approx((r.r_sum_y, r.r_bhat3, r.r_quad), abs=1e-15)
    assert q[1] == pytest.approx(-1 / 480, abs=1e-12)


def _rand_by(rng, J):
    b = [F(rng.randint(-20, 20), rng.randint(1, 20)) for _ in range(J)]
    y = [F(rng.randint(-20, 20), rng.randint(1, 20)) for _ in range(J)]
    return b, y


def test_scalar_vector_agreement():
    rng = random.Random(11)
    for _ in range(500):
        dc = derive_from_by(*_rand_by(rng, rng.randint(1, 8)))
        r = residuals_order5(dc)
        assert quadric_residuals(dc) == (r.r_sum_y, r.r_bhat3, r.r_quad)


def test_quadratic_form_symmetrized():
    rng = random.Random(3)
    for _ in range(50):
        dc = derive_from_by(*_rand_by(rng, rng.randint(1, 6)))
        y, S, J = dc.y, dc.S, dc.J
        plain = sum(y[i] * S[i][j] * y[j] for i in range(J) for j in range(J))
        sym = sum(y[i] * (S[i][j] + S[j][i]) / 2 * y[j] for i in range(J) for j in range(J))
        assert plain == sym


def test_quadric_system_fields_match():
    dc = derive_from_by([F(1, 2), F(1, 2)], [F(1, 12), F(5, 12)])
    q = quadric_system(dc)
    assert q.e == dc.e and q.d == dc.d and q.S == dc.S
    assert q.rhs == (F(1, 2), F(1, 5), F(1, 20))
