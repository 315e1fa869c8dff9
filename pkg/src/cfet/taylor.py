"""Word-coefficient calculus for the composed step on u' = (A0 + t A1) u.

A word ``"k1...km"`` over {0, 1} stands for the product A_k1 ... A_km.  Its
weight is m plus the number of 1-letters, i.e. the power of the step size
that multiplies it.  ``c^{(J)}_w`` is the coefficient of a word in the
Taylor expansion of the J-fold product of exponentials, ``s_w`` the one of
the exact flow.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import factorial

from .conditions import ResidualVector
from .scalars import is_exact

SUBSET = ("", "0", "1", "01", "11", "001", "011", "0001")


def weight(word: str) -> int:
    return len(word) + word.count("1")


def all_words(max_weight: int = 5) -> tuple:
    """Every word of weight <= max_weight (the empty word included)."""
    out = []
    for m in range(max_weight + 1):
        out.extend("".join(p) for p in product("01", repeat=m) if weight("".join(p)) <= max_weight)
    return tuple(out)


@dataclass(frozen=True)
class WordCoefficientTable:
    J: int
    coeffs: dict

    def __getitem__(self, word):
        return self.coeffs[word]

    def to_json(self) -> dict:
        from .scalars import format_scalar

        return {w: format_scalar(v) for w, v in self.coeffs.items()}


@dataclass(frozen=True)
class ExactFlowTable:
    coeffs: dict

    def __getitem__(self, word):
        return self.coeffs[word]


def _prepare(b, y):
    b, y = list(b), list(y)
    if len(b) != len(y):
        raise ValueError(f"length mismatch: len(b)={len(b)}, len(y)={len(y)}")
    if not b:
        raise ValueError("need J >= 1")
    if all(is_exact(v) for v in b + y):
        return [Fraction(v) for v in b], [Fraction(v) for v in y], Fraction
    return [float(v) for v in b], [float(v) for v in y], float


def _exp_word(word, bj, yj, one):
    # coefficient of the word in exp(b A0 + y A1): b^{#0} y^{#1} / m!
    n1 = word.count("1")
    return one * bj ** (len(word) - n1) * yj**n1 / factorial(len(word))


def _check_suffix_closed(words):
    ws = set(words)
    for w in words:
        for i in range(len(w) + 1):
            if w[i:] not in ws:
                raise ValueError(f"word set must be closed under suffixes; {w[i:]!r} missing")


def word_coefficients_recursive(b, y, words=SUBSET) -> WordCoefficientTable:
    """J=1 table, then one left multiplication by exp(b_j A0 + y_j A1) per extra factor.

    The new exponential sits on the left, so ``c^{(J)}_{uv}`` picks up the
    exponential's coefficient for the prefix u times ``c^{(J-1)}_v``.  For the
    default word subset this is exactly the printed recursion.
    """
    b, y, one = _prepare(b, y)
    _check_suffix_closed(words)
    c = {w: _exp_word(w, b[0], y[0], one(1)) for w in words}
    for bj, yj in zip(b[1:], y[1:]):
        prev = c
        c = {w: sum((_exp_word(w[:i], bj, yj, one(1)) * prev[w[i:]] for i in range(len(w) + 1)), one(0)) for w in words}
    return WordCoefficientTable(J=len(b), coeffs=c)


def word_coefficients_closed(b, y) -> WordCoefficientTable:
    """Closed forms for the word subset in terms of prefix sums of b and y.

    The ``001`` entry carries ``+ 1/2 sum (bhat^2 + b^2/12) y``; a minus sign
    there disagrees with the recursion already for J = 1.
    """
    b, y, one = _prepare(b, y)
    J = len(b)
    half = one(1) / 2
    bhat, yhat = [], []
    pb = py = one(0)
    for bj, yj in zip(b, y):
        pb += bj
        py += yj
        bhat.append(pb - half * bj)
        yhat.append(py - half * yj)
    z = one(0)
    s1 = sum((bhat[j] * y[j] for j in range(J)), z)
    s2 = sum(((bhat[j] ** 2 + b[j] ** 2 / 12) * y[j] for j in range(J)), z)
    s3 = sum(((bhat[j] ** 3 + bhat[j] * b[j] ** 2 / 4) * y[j] for j in range(J)), z)
    q = sum(((yhat[j] ** 2 + y[j] ** 2 / 12) * b[j] for j in range(J)), z)
    c = {"": one(1), "0": sum(b, z), "1": sum(y, z)}
    c0, c1 = c["0"], c["1"]
    c["01"] = c0 * c1 - s1
    c["11"] = half * c1**2
    c["001"] = c0 * c["01"] - half * c0**2 * c1 + half * s2
    c["011"] = half * q
    c["0001"] = c0 * c["001"] - half * c0**2 * c["01"] + c0**3 * c1 / 6 - s3 / 6
    return WordCoefficientTable(J=J, coeffs={w: c[w] for w in SUBSET})


def exact_flow_coefficients(words=SUBSET) -> ExactFlowTable:
    """s_w from u' = (A0 + tA1)u: differentiating gives s_{k v} = s_v / weight(k v)."""
    _check_suffix_closed(words)
    s = {}
    for w in sorted(words, key=len):
        s[w] = Fraction(1) if not w else s[w[1:]] / weight(w)
    return ExactFlowTable(coeffs={w: s[w] for w in words})


def oracle_residuals(b, y) -> ResidualVector:
    """Order-5 residuals recovered from the word coefficients of the recursion.

    Inverting the closed forms expresses each weighted sum through
    coefficients; evaluating the same expression on the exact-flow table gives
    the right-hand side, so each residual is a difference of the two.
    """
    c = word_coefficients_recursive(b, y).coeffs
    s = exact_flow_coefficients().coeffs

    def sums(t):
        c0, c1 = t["0"], t["1"]
        return (
            c0,
            c1,
            c0 * c1 - t["01"],
            2 * (t["001"] - c0 * t["01"]) + c0**2 * c1,
            6 * (c0 * t["001"] - t["0001"]) - 3 * c0**2 * t["01"] + c0**3 * c1,
            2 * t["011"],
        )

    lhs, rhs = sums(c), sums(s)
    if not all(is_exact(v) for v in lhs):
        rhs = tuple(float(v) for v in rhs)
    return ResidualVector(*(a - r for a, r in zip(lhs, rhs)))
