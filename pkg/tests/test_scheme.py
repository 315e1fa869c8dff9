import io
import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfet.exactla import is_positive_definite, ldl_pivots
from cfet.scalars import ScalarParseError, format_scalar, parse_scalar
from cfet.scheme import (
    Scheme,
    SchemeError,
    bundled_scheme,
    derive_coefficients,
    derive_from_by,
    dump_scheme,
    load_scheme,
    validate_scheme,
)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=30)
positive = st.fractions(min_value=F(1, 30), max_value=5, max_denominator=30)


def doc(**kw):
    base = {"name": "t", "J": 1, "K": 1, "a": [["1"]], "c": ["1/2"]}
    base.update(kw)
    return json.dumps(base).encode()


@pytest.mark.parametrize(
    "text, value",
    [("1/2", F(1, 2)), ("-3", F(-3)), ("6/4", F(3, 2)), ("-2/6", F(-1, 3)), ("0.25", 0.25), ("1e-3", 1e-3)],
)
def test_parse_scalar(text, value):
    x = parse_scalar(text)
    assert x == value and type(x) is type(value)


@pytest.mark.parametrize("text", ["1/0", "abc", "1/2/3", "nan", "", "1/-2"])
def test_parse_scalar_rejects(text):
    with pytest.raises(ScalarParseError):
        parse_scalar(text)


def test_lowest_terms():
    x = parse_scalar("-10/4")
    assert (x.numerator, x.denominator) == (-5, 2)
    assert format_scalar(x) == "-5/2"


def test_load_midpoint():
    s = load_scheme(io.BytesIO(doc()))
    assert s.J == s.K == 1 and s.a == ((F(1),),) and s.c == (F(1, 2),)
    assert s.exact


def test_dimension_mismatch():
    with pytest.raises(SchemeError, match="dimension"):
        load_scheme(doc(J=2, K=2, a=[["1", "0"], ["0", "1"]], c=["1/2"]))


def test_decimal_entries_are_inexact():
    s = load_scheme(doc(K=2, a=[["0.25", "0.25"]], c=["0", "1"]))
    assert not s.exact
    assert any("float" in n for n in validate_scheme(s).notes)


@pytest.mark.parametrize(
    "bad",
    [
        doc(extra=1),
        doc(a=[["1/0"]]),
        b"{not json",
        doc(a=[[1]]),
        doc(J="1"),
        json.dumps({"J": 1, "K": 1, "a": [["1"]]}).encode(),
    ],
)
def test_malformed(bad):
    with pytest.raises(SchemeError):
        load_scheme(bad)


def test_derive_midpoint():
    dc = derive_coefficients(bundled_scheme("midpoint"))
    assert dc.b == (1,) and dc.y == (F(1, 2),) and dc.bhat == (F(1, 2),) and dc.sigma == 1


def test_derive_equal_weights():
    dc = derive_from_by([F(1, 2), F(1, 2)], [0, 0])
    assert dc.bhat == (F(1, 4), F(3, 4))
    assert dc.d == (F(1, 32), F(15, 32))
    assert dc.S == ((F(2, 3), F(1, 4)), (F(1, 4), F(1, 6)))


def test_derive_cf4():
    dc = derive_coefficients(bundled_scheme("cf4"))
    assert not dc.exact
    assert dc.b == pytest.approx((0.5, 0.5), abs=1e-15)
    assert dc.y == pytest.approx((1 / 12, 5 / 12), abs=1e-15)


@pytest.mark.parametrize("name, ok", [("midpoint", True), ("cf4", True), ("left-endpoint", True), ("negative-demo", False)])
def test_positivity(name, ok):
    assert validate_scheme(bundled_scheme(name)).positivity_ok is ok


def test_negative_demo_weights():
    dc = derive_coefficients(bundled_scheme("negative-demo"))
    assert dc.b == (F(-1, 2), F(3, 2)) and dc.y == (F(-1, 8), F(5, 8))


def _schemes():
    return st.integers(1, 6).flatmap(
        lambda J: st.integers(1, 6).flatmap(
            lambda K: st.builds(
                lambda a, c: Scheme("r", J, K, a, c),
                st.lists(st.lists(rationals, min_size=K, max_size=K), min_size=J, max_size=J),
                st.lists(rationals, min_size=K, max_size=K),
            )
        )
    )


@settings(max_examples=100, deadline=None)
@given(_schemes())
def test_prefix_sums_and_sigma(s):
    dc = derive_coefficients(s)
    for j in range(s.J):
        assert dc.bhat[j] == sum(dc.b[: j + 1]) - dc.b[j] / 2
        assert dc.yhat[j] == sum(dc.y[: j + 1]) - dc.y[j] / 2
    assert dc.sigma == sum(dc.b)
    assert all(dc.S[i][j] == dc.S[j][i] for i in range(s.J) for j in range(s.J))


@settings(max_examples=100, deadline=None)
@given(_schemes())
def test_round_trip(s):
    again = load_scheme(dump_scheme(s).encode())
    assert again == s
    assert all(type(x) is type(y) for r1, r2 in zip(s.a, again.a) for x, y in zip(r1, r2))


def test_round_trip_float_scheme():
    s = bundled_scheme("cf4")
    assert load_scheme(dump_scheme(s)) == s


@settings(max_examples=100, deadline=None)
@given(st.lists(positive, min_size=1, max_size=8))
def test_S_positive_definite_for_positive_b(b):
    dc = derive_from_by(b, [0] * len(b))
    pivots = ldl_pivots(dc.S)
    assert len(pivots) == len(b) and all(p > 0 for p in pivots)


def test_S_indefinite_for_negative_weight():
    # S_11 = b_1/3 + b_2
    dc = derive_from_by([F(-1), F(1, 10)], [0, 0])
    assert not is_positive_definite(dc.S)
