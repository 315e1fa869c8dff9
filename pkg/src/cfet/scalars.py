"""Exact-or-float scalars used throughout the package.

A scalar is either a :class:`fractions.Fraction` (exact, always in lowest
terms with a positive denominator) or a Python ``float``.  Arithmetic
between two fractions stays exact; any float operand demotes the result.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Union

Scalar = Union[Fraction, float]

_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")
_DECIMAL = re.compile(r"^\s*[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?\s*$")


class ScalarParseError(ValueError):
    pass


def parse_scalar(text) -> Scalar:
    """Parse ``"p/q"``, ``"p"`` (exact) or a decimal/scientific literal (float)."""
    if isinstance(text, bool):
        raise ScalarParseError(f"not a scalar: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if isinstance(text, float):
        return _finite(text, text)
    if not isinstance(text, str):
        raise ScalarParseError(f"not a scalar: {text!r}")
    text = text.replace("−", "-")
    m = _RATIONAL.match(text)
    if m:
        num, den = m.groups()
        if den is not None and int(den) == 0:
            raise ScalarParseError(f"zero denominator in {text!r}")
        return Fraction(int(num), int(den) if den is not None else 1)
    if _DECIMAL.match(text):
        return _finite(float(text), text)
    raise ScalarParseError(f"malformed scalar {text!r}")


def _finite(x: float, src) -> float:
    if x != x or x in (float("inf"), float("-inf")):
        raise ScalarParseError(f"non-finite scalar {src!r}")
    return x


def format_scalar(x: Scalar) -> str:
    """Inverse of :func:`parse_scalar` (floats use ``repr`` so they round-trip)."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    return repr(float(x))


def to_json_scalar(x: Scalar):
    """Exact values as ``"p/q"`` strings, floats as JSON numbers."""
    return format_scalar(x) if isinstance(x, Fraction) else float(x)


def is_exact(x) -> bool:
    return isinstance(x, (Fraction, int)) and not isinstance(x, bool)


def all_exact(values: Iterable) -> bool:
    return all(is_exact(v) for v in values)


def as_fraction(x) -> Fraction:
    if not is_exact(x):
        raise TypeError(f"exact rational required, got {x!r}")
    return Fraction(x)


def parse_vector(text: str) -> list[Scalar]:
    """Parse a comma separated list such as ``"1/2,1/2"``."""
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise ScalarParseError("empty vector")
    return [parse_scalar(p) for p in parts]
