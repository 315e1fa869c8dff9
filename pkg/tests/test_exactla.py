from fractions import Fraction as F

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from cfet import exactla as xla

entry = st.fractions(min_value=-9, max_value=9, max_denominator=12)


def square(n):
    return st.lists(st.lists(entry, min_size=n, max_size=n), min_size=n, max_size=n)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(square(n), st.lists(entry, min_size=n, max_size=n))))
def test_solve_against_sympy(args):
    A, rhs = args
    M = sp.Matrix(A)
    if M.det() == 0:
        with pytest.raises(xla.SingularMatrixError):
            xla.solve(A, rhs)
        return
    x = xla.solve(A, rhs)
    assert [sp.Rational(v.numerator, v.denominator) for v in x] == list(M.LUsolve(sp.Matrix(rhs)))
    assert xla.det(A) == F(str(M.det()))


def test_pivoting_needed():
    A = [[0, 1], [1, 0]]
    assert xla.solve(A, [F(2), F(3)]) == [3, 2]
    assert xla.det(A) == -1


def test_inverse_identity():
    A = [[F(2, 3), F(1, 4)], [F(1, 4), F(1, 6)]]
    assert xla.matmul(A, xla.inverse(A)) == xla.identity(2)


def test_multiple_rhs():
    A = [[F(1), F(2)], [F(3), F(4)]]
    X = xla.solve(A, [[1, 0], [0, 1]])
    assert X == [[-2, 1], [F(3, 2), F(-1, 2)]]
