import random
from math import factorial
from fractions import Fraction as F

import pytest
import sympy as sp

from cfet.conditions import residuals_order5
from cfet.scheme import derive_from_by
from cfet.taylor import (
    SUBSET,
    all_words,
    exact_flow_coefficients,
    oracle_residuals,
    weight,
    word_coefficients_closed,
    word_coefficients_recursive,
)

PRINTED_S = {
    "": F(1),
    "0": F(1),
    "1": F(1, 2),
    "01": F(1, 6),
    "11": F(1, 8),
    "001": F(1, 24),
    "011": F(1, 40),
    "0001": F(1, 120),
}


def printed_recursion(b, y):
    """The listed J=1 formulas and update rules, written out term by term."""
    b1, y1 = b[0], y[0]
    c = {
        "": F(1),
        "0": b1,
        "1": y1,
        "01": b1 * y1 / 2,
        "11": y1**2 / 2,
        "001": b1**2 * y1 / 6,
        "011": b1 * y1**2 / 6,
        "0001": b1**3 * y1 / 24,
    }
    for bj, yj in zip(b[1:], y[1:]):
        p = c
        c = {
            "": p[""],
            "0": p["0"] + bj * p[""],
            "1": p["1"] + yj * p[""],
            "01": p["01"] + bj * p["1"] + bj * yj * p[""] / 2,
            "11": p["11"] + yj * p["1"] + yj**2 * p[""] / 2,
            "001": p["001"] + bj * p["01"] + bj**2 * p["1"] / 2 + bj**2 * yj * p[""] / 6,
            "011": p["011"] + bj * p["11"] + bj * yj * p["1"] / 2 + bj * yj**2 * p[""] / 6,
            "0001": p["0001"] + bj * p["001"] + bj**2 * p["01"] / 2 + bj**3 * p["1"] / 6 + bj**3 * yj * p[""] / 24,
        }
    return c


def rand_by(rng, J, lo=-12, hi=12):
    return (
        [F(rng.randint(lo, hi), rng.randint(1, 12)) for _ in range(J)],
        [F(rng.randint(lo, hi), rng.randint(1, 12)) for _ in range(J)],
    )


def test_weight():
    assert weight("") == 0 and weight("0001") == 5 and weight("11") == 4
    assert set(SUBSET) <= set(all_words(5))
    assert all(weight(w) <= 5 for w in all_words(5))


def test_base_case_values():
    t = word_coefficients_recursive([1], [F(1, 2)])
    assert t["0001"] == F(1, 48)
    assert t["11"] == F(1, 8)


def test_two_factors_01():
    assert word_coefficients_recursive([1, 1], [1, 1])["01"] == 2
    assert word_coefficients_closed([1, 1], [1, 1])["01"] == 2


def test_closed_011_single():
    t = word_coefficients_closed([1], [F(1, 2)])
    assert t["011"] == F(1, 24) == F(1) * F(1, 2) ** 2 / 6


def test_recursive_matches_printed_rules():
    rng = random.Random(5)
    for _ in range(100):
        b, y = rand_by(rng, rng.randint(1, 6))
        assert word_coefficients_recursive(b, y).coeffs == printed_recursion(b, y)


def test_closed_11():
    rng = random.Random(6)
    for _ in range(20):
        b, y = rand_by(rng, rng.randint(1, 6))
        assert word_coefficients_closed(b, y)["11"] == sum(y) ** 2 / 2


def test_recursive_closed_agree():
    rng = random.Random(8)
    for _ in range(500):
        b, y = rand_by(rng, rng.randint(1, 6))
        assert word_coefficients_recursive(b, y).coeffs == word_coefficients_closed(b, y).coeffs


def test_grading_homogeneity():
    rng = random.Random(9)
    for _ in range(50):
        b, y = rand_by(rng, rng.randint(1, 5))
        lam = F(rng.randint(1, 9), rng.randint(1, 9)) * rng.choice([-1, 1])
        t = word_coefficients_recursive(b, y)
        ts = word_coefficients_recursive([lam * v for v in b], [lam**2 * v for v in y])
        for w in SUBSET:
            assert ts[w] == lam ** weight(w) * t[w]


def test_full_alphabet_recursion_grading():
    words = all_words(5)
    rng = random.Random(10)
    b, y = rand_by(rng, 3)
    lam = F(3, 2)
    t = word_coefficients_recursive(b, y, words)
    ts = word_coefficients_recursive([lam * v for v in b], [lam**2 * v for v in y], words)
    assert all(ts[w] == lam ** weight(w) * t[w] for w in words)


def test_exact_flow_printed_values():
    assert exact_flow_coefficients().coeffs == PRINTED_S


def _word_table(expr, A0, A1):
    out = {}
    for term in sp.Add.make_args(sp.expand(expr)):
        comm, ops = term.args_cnc()
        word = ""
        for op in ops:
            base, exp = op.as_base_exp()
            word += ("0" if base == A0 else "1") * int(exp)
        coeff = sp.Mul(*comm)
        out[word] = out.get(word, 0) + F(int(coeff.p), int(coeff.q))
    return out


def test_exact_flow_against_symbolic_derivatives():
    # independent oracle: differentiate u' = (A0 + t A1) u with non-commuting symbols
    A0, A1 = sp.symbols("A0 A1", commutative=False)
    t = sp.symbols("t")
    D = sp.Integer(1)  # u^(q)(t) = D_q(t) u(t)
    words = all_words(5)
    s = exact_flow_coefficients(words)
    for q in range(6):
        table = _word_table(D.subs(t, 0), A0, A1)
        for w in (w for w in words if weight(w) == q):
            assert table.get(w, 0) == s[w] * factorial(q), w
        assert all(weight(w) == q for w in table)
        D = sp.expand(sp.diff(D, t) + D * (A0 + t * A1))


def test_exact_flow_a1_a0_a0():
    s = exact_flow_coefficients(all_words(5))
    assert s["100"] * 24 == 3


def test_oracle_residual_examples():
    assert oracle_residuals([1], [F(1, 2)]).r_bhat_y == F(-1, 12)
    assert oracle_residuals([F(1, 2), F(1, 2)], [F(1, 12), F(5, 12)]).r_bhat3 == F(-1, 480)


def test_oracle_linear_subsystem_point():
    # b = (1/2, 1/2); y solving e^T y = 1/2, d^T y = 1/5
    b = [F(1, 2), F(1, 2)]
    d = derive_from_by(b, [0, 0]).d
    y2 = (F(1, 5) - d[0] / 2) / (d[1] - d[0])
    y = [F(1, 2) - y2, y2]
    r = oracle_residuals(b, y)
    assert r.r_sum_y == 0 and r.r_bhat3 == 0
    assert r == residuals_order5(derive_from_by(b, y))


def test_oracle_matches_direct():
    rng = random.Random(12)
    for _ in range(500):
        b, y = rand_by(rng, rng.randint(1, 6))
        assert oracle_residuals(b, y) == residuals_order5(derive_from_by(b, y))


def test_float_path():
    r = oracle_residuals([0.5, 0.5], [1 / 12, 5 / 12])
    assert r.r_bhat3 == pytest.approx(-1 / 480, abs=1e-14)


def test_length_mismatch():
    with pytest.raises(ValueError):
        word_coefficients_recursive([1, 2], [1])
    with pytest.raises(ValueError):
        word_coefficients_closed([1], [1, 2])
    with pytest.raises(ValueError):
        oracle_residuals([], [])
