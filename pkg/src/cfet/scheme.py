"""Scheme data, derived coefficient algebra, validation and scheme file I/O."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional

from .scalars import Scalar, ScalarParseError, format_scalar, is_exact, parse_scalar

_FIELDS = {"name", "claimed_order", "J", "K", "a", "c"}
_HALF = Fraction(1, 2)


class SchemeError(ValueError):
    """Malformed scheme document or inconsistent dimensions."""


@dataclass(frozen=True)
class Scheme:
    """Coefficient table ``a`` (J x K) and nodes ``c`` (length K)."""

    name: str
    J: int
    K: int
    a: tuple
    c: tuple
    claimed_order: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(tuple(row) for row in self.a))
        object.__setattr__(self, "c", tuple(self.c))
        if self.J < 1 or self.K < 1:
            raise SchemeError("J and K must be positive")
        if len(self.a) != self.J or any(len(row) != self.K for row in self.a):
            raise SchemeError(f"a must be {self.J}x{self.K}")
        if len(self.c) != self.K:
            raise SchemeError(f"c must have {self.K} entries, got {len(self.c)}")
        if self.claimed_order is not None and self.claimed_order < 1:
            raise SchemeError("claimed_order must be positive")

    @property
    def exact(self) -> bool:
        return all(is_exact(x) for row in self.a for x in row) and all(is_exact(x) for x in self.c)

    def to_dict(self) -> dict:
        doc = {"name": self.name}
        if self.claimed_order is not None:
            doc["claimed_order"] = self.claimed_order
        doc.update(
            J=self.J,
            K=self.K,
            a=[[format_scalar(x) for x in row] for row in self.a],
            c=[format_scalar(x) for x in self.c],
        )
        return doc


@dataclass(frozen=True)
class DerivedCoefficients:
    J: int
    b: tuple
    y: tuple
    bhat: tuple
    yhat: tuple
    sigma: Scalar
    e: tuple
    d: tuple
    L: tuple
    D: tuple
    S: tuple
    exact: bool = True


@dataclass(frozen=True)
class ValidationReport:
    positivity_ok: bool
    exactness: bool
    notes: list = field(default_factory=list)


def _check_int(doc, key):
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        raise SchemeError(f"field {key!r} must be an integer")
    return v


def scheme_from_dict(doc: dict) -> Scheme:
    if not isinstance(doc, dict):
        raise SchemeError("scheme document must be a JSON object")
    unknown = set(doc) - _FIELDS
    if unknown:
        raise SchemeError(f"unknown fields: {sorted(unknown)}")
    missing = {"J", "K", "a", "c"} - set(doc)
    if missing:
        raise SchemeError(f"missing fields: {sorted(missing)}")
    J, K = _check_int(doc, "J"), _check_int(doc, "K")
    a, c = doc["a"], doc["c"]
    if not isinstance(a, list) or not all(isinstance(r, list) for r in a) or not isinstance(c, list):
        raise SchemeError("a must be a list of lists and c a list")
    if len(a) != J or any(len(r) != K for r in a) or len(c) != K:
        raise SchemeError(
            f"dimension mismatch: declared J={J}, K={K} but a is "
            f"{len(a)}x{[len(r) for r in a]} and c has {len(c)} entries"
        )
    claimed = doc.get("claimed_order")
    if claimed is not None:
        claimed = _check_int(doc, "claimed_order")
    name = doc.get("name", "unnamed")
    if not isinstance(name, str):
        raise SchemeError("name must be a string")
    for v in [x for r in a for x in r] + list(c):
        if not isinstance(v, str):
            raise SchemeError(f"scalars must be strings, got {v!r}")
    try:
        aa = [[parse_scalar(x) for x in r] for r in a]
        cc = [parse_scalar(x) for x in c]
    except ScalarParseError as exc:
        raise SchemeError(str(exc)) from exc
    return Scheme(name=name, J=J, K=K, a=aa, c=cc, claimed_order=claimed)


def load_scheme(source) -> Scheme:
    """Read a scheme from a binary/text stream, bytes, str or path."""
    if isinstance(source, Path):
        raw = source.read_bytes()
    elif isinstance(source, (bytes, bytearray, str)):
        raw = source
    else:
        raw = source.read()
    try:
        doc = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SchemeError(f"malformed scheme document: {exc}") from exc
    return scheme_from_dict(doc)


def dump_scheme(s: Scheme) -> str:
    return json.dumps(s.to_dict(), indent=2)


def bundled_scheme_names() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("cfet.data").iterdir() if p.name.endswith(".json"))


def bundled_scheme(name: str) -> Scheme:
    """One of ``midpoint``, ``left-endpoint``, ``cf4``, ``negative-demo``."""
    path = resources.files("cfet.data") / f"{name}.json"
    if not path.is_file():
        raise KeyError(f"no bundled scheme {name!r}; have {bundled_scheme_names()}")
    return load_scheme(path.read_bytes())


def _zero_like(exact):
    return Fraction(0) if exact else 0.0


def derive_coefficients(s: Scheme) -> DerivedCoefficients:
    b = [sum(row, _zero_like(True)) for row in s.a]
    y = [sum((ajk * ck for ajk, ck in zip(row, s.c)), _zero_like(True)) for row in s.a]
    return derive_from_by(b, y)


def derive_from_by(b, y) -> DerivedCoefficients:
    """Everything in :class:`DerivedCoefficients` depends on the weights only through (b, y)."""
    b, y = list(b), list(y)
    if len(b) != len(y) or not b:
        raise ValueError("b and y must be non-empty and of equal length")
    J = len(b)
    exact = all(is_exact(v) for v in b + y)
    if exact:
        b = [Fraction(v) for v in b]
        y = [Fraction(v) for v in y]
        half, one, zero = _HALF, Fraction(1), Fraction(0)
    else:
        b = [float(v) for v in b]
        y = [float(v) for v in y]
        half, one, zero = 0.5, 1.0, 0.0

    bhat, yhat = [], []
    pb = py = zero
    for bj, yj in zip(b, y):
        pb += bj
        py += yj
        bhat.append(pb - half * bj)
        yhat.append(py - half * yj)
    d = [bh**3 + bh * bj**2 / 4 for bh, bj in zip(bhat, b)]
    L = [[half if i == j else (one if i > j else zero) for j in range(J)] for i in range(J)]
    D = [[b[i] if i == j else zero for j in range(J)] for i in range(J)]
    # (L^T D L)_{ij} = sum_k L_ki b_k L_kj ; plus D/12 on the diagonal
    S = [
        [sum((L[k][i] * b[k] * L[k][j] for k in range(J)), zero) + (b[i] / 12 if i == j else zero) for j in range(J)]
        for i in range(J)
    ]
    return DerivedCoefficients(
        J=J,
        b=tuple(b),
        y=tuple(y),
        bhat=tuple(bhat),
        yhat=tuple(yhat),
        sigma=sum(b, zero),
        e=tuple([one] * J),
        d=tuple(d),
        L=tuple(map(tuple, L)),
        D=tuple(map(tuple, D)),
        S=tuple(map(tuple, S)),
        exact=exact,
    )


def validate_scheme(s: Scheme) -> ValidationReport:
    notes = []
    for j, row in enumerate(s.a):
        for k, x in enumerate(row):
            if not is_exact(x):
                notes.append(f"a[{j}][{k}] is a float; exact certification unavailable")
    for k, x in enumerate(s.c):
        if not is_exact(x):
            notes.append(f"c[{k}] is a float; exact certification unavailable")
    dc = derive_coefficients(s)
    bad = [j for j, bj in enumerate(dc.b) if not bj > 0]
    if bad:
        notes.append("positivity condition violated at j = " + ", ".join(str(j + 1) for j in bad))
    return ValidationReport(positivity_ok=not bad, exactness=s.exact, notes=notes)
