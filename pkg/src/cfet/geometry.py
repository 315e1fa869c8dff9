"""Exact certificates that positive weights admit no order-5 y.

For positive b the three conditions on y (two hyperplanes and the
ellipsoid ``y^T S y = 1/20``) are infeasible iff ``c^T G^{-1} c > 1/20`` with
``G`` the Gram matrix of ``e, d`` in the ``S^{-1}`` inner product.  The
functions here evaluate that criterion, the sharper inequality behind it,
and the algebra of its inductive proof, all in exact rational arithmetic.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import exactla as xla
from .scalars import format_scalar, is_exact
from .scheme import derive_from_by

THRESHOLD = Fraction(1, 20)
TARGET = (Fraction(1, 2), Fraction(1, 5))
KEY_BOUND = Fraction(9, 5)


class CertificationError(ValueError):
    """Precondition violated (non-positive or inexact weights)."""


@dataclass(frozen=True)
class FeasibilityCertificate:
    J: int
    b: tuple
    gram: Optional[tuple]
    value: Optional[Fraction]
    threshold: Fraction
    margin: Optional[Fraction]
    verdict: str
    reason: str = ""

    @property
    def infeasible(self) -> bool:
        return self.verdict == "infeasible"

    def to_json(self) -> dict:
        fmt = lambda v: None if v is None else format_scalar(v)  # noqa: E731
        doc = {
            "J": self.J,
            "b": [format_scalar(v) for v in self.b],
            "gram": None if self.gram is None else [[format_scalar(v) for v in row] for row in self.gram],
            "value": fmt(self.value),
            "threshold": format_scalar(self.threshold),
            "margin": fmt(self.margin),
            "verdict": self.verdict,
        }
        if self.reason:
            doc["reason"] = self.reason
        return doc


@dataclass(frozen=True)
class IntersectionQuery:
    normals: Sequence  # m vectors of length n
    offsets: Sequence  # m values
    quadric: Sequence  # n x n SPD
    level: object

    @property
    def exact(self) -> bool:
        vals = [x for a in self.normals for x in a] + list(self.offsets) + [x for r in self.quadric for x in r] + [self.level]
        return all(is_exact(v) for v in vals)


@dataclass(frozen=True)
class IntersectionResult:
    intersects: bool
    min_value: object
    gram: object = None


@dataclass(frozen=True)
class InequalityReport:
    b: tuple
    sigma: Fraction
    lhs: Fraction
    bound: Fraction
    holds: bool
    margin: Fraction = field(default=None)


def _exact_positive(b) -> list:
    b = list(b)
    if not b:
        raise CertificationError("empty weight vector")
    if not all(is_exact(v) for v in b):
        raise CertificationError("exact rational weights required")
    b = [Fraction(v) for v in b]
    bad = [j + 1 for j, v in enumerate(b) if v <= 0]
    if bad:
        raise CertificationError(f"positivity condition violated at j = {bad}")
    return b


def _s_d(b):
    dc = derive_from_by(b, [Fraction(0)] * len(b))
    return [list(r) for r in dc.S], list(dc.d), list(dc.e)


def _inner_products(S, e, d):
    # one exact solve S [u v] = [e d]
    cols = xla.solve(S, [[ei, di] for ei, di in zip(e, d)])
    Se = [r[0] for r in cols]
    Sd = [r[1] for r in cols]
    return xla.dot(e, Se), xla.dot(e, Sd), xla.dot(d, Sd)


def gram_matrix(b):
    b = _exact_positive(b)
    S, d, e = _s_d(b)
    eSe, eSd, dSd = _inner_products(S, e, d)
    return [[eSe, eSd], [eSd, dSd]]


def certify_no_order5_y(b) -> FeasibilityCertificate:
    b = _exact_positive(b)
    J = len(b)
    if J == 1:
        return _certify_single(b)
    S, d, e = _s_d(b)
    G = [list(r) for r in gram_matrix(b)]
    try:
        w = xla.solve(G, list(TARGET))
    except xla.SingularMatrixError as exc:  # e, d independent for positive b
        raise ArithmeticError("singular Gram matrix for positive weights") from exc
    value = xla.dot(TARGET, w)
    margin = value - THRESHOLD
    return FeasibilityCertificate(
        J=J,
        b=tuple(b),
        gram=tuple(map(tuple, G)),
        value=value,
        threshold=THRESHOLD,
        margin=margin,
        verdict="infeasible" if margin > 0 else "feasible",
    )


def _certify_single(b):
    (b1,) = b
    d1 = b1**3 / 4
    S11 = b1 / 3
    # e^T y = 1/2 pins y = 1/2
    if d1 / 2 != TARGET[1]:
        reason = f"linear system in one unknown inconsistent: d1 = {format_scalar(d1)} != 2/5"
        verdict = "infeasible"
    elif S11 / 4 != THRESHOLD:
        reason = "unique y = 1/2 misses the quadric"
        verdict = "infeasible"
    else:
        reason, verdict = "y = 1/2 satisfies all three equations", "feasible"
    return FeasibilityCertificate(
        J=1, b=(b1,), gram=None, value=None, threshold=THRESHOLD, margin=None, verdict=verdict, reason=reason
    )


def ellipsoid_hyperplane_intersect(q: IntersectionQuery) -> IntersectionResult:
    """Do the hyperplanes a_i^T x = c_i meet the ellipsoid x^T S x = level?

    True iff ``c^T G^{-1} c <= level`` with ``G_ij = a_i^T S^{-1} a_j``; the
    returned ``min_value`` is ``c^T G^{-1} c``, the minimum of x^T S x over the
    affine intersection.
    """
    m = len(q.normals)
    n = len(q.quadric)
    if m > n or any(len(a) != n for a in q.normals) or len(q.offsets) != m:
        raise ValueError("need m <= n normals of length n and m offsets")
    if q.exact:
        S = [[Fraction(x) for x in r] for r in q.quadric]
        xla.require_spd(S)
        A = [[Fraction(x) for x in a] for a in q.normals]
        Sinv_A = xla.solve(S, xla.transpose(A))  # n x m
        G = xla.matmul(A, Sinv_A)
        try:
            w = xla.solve(G, [Fraction(x) for x in q.offsets])
        except xla.SingularMatrixError as exc:
            raise ValueError("normals are linearly dependent") from exc
        value = xla.dot([Fraction(x) for x in q.offsets], w)
        return IntersectionResult(value <= Fraction(q.level), value, G)
    S = np.asarray(q.quadric, dtype=float)
    if not np.allclose(S, S.T):
        raise ValueError("quadric is not symmetric")
    try:
        np.linalg.cholesky(S)
    except np.linalg.LinAlgError as exc:
        raise ValueError("quadric is not positive definite") from exc
    A = np.asarray(q.normals, dtype=float).T
    Z = _refined_solve(S, A)
    G = A.T.astype(np.longdouble) @ Z.astype(np.longdouble)
    G = (G + G.T) / 2
    if np.linalg.matrix_rank(G.astype(float)) < m:
        raise ValueError("normals are linearly dependent")
    c = np.asarray(q.offsets, dtype=float)
    w = _refined_solve(G, c)
    value = float(c.astype(np.longdouble) @ w.astype(np.longdouble))
    return IntersectionResult(value <= float(q.level), value, G.astype(float))


def _refined_solve(M, B, sweeps=3):
    """Solve M X = B in double precision with residuals accumulated in long double.

    ``M`` may be given in long double; the LU solve runs on its double rounding
    and the refinement sweeps recover the digits lost to conditioning.
    """
    M_ld = np.asarray(M, dtype=np.longdouble)
    B_ld = np.asarray(B, dtype=np.longdouble)
    M_d = M_ld.astype(float)
    X = np.linalg.solve(M_d, B_ld.astype(float)).astype(np.longdouble)
    for _ in range(sweeps):
        R = B_ld - M_ld @ X
        X = X + np.linalg.solve(M_d, R.astype(float))
    return X


def constrained_min_oracle(q: IntersectionQuery):
    """min x^T S x subject to A^T x = c from the KKT system [[2S, A], [A^T, 0]]."""
    m = len(q.normals)
    n = len(q.quadric)
    if q.exact:
        K = [[2 * Fraction(q.quadric[i][j]) for j in range(n)] + [Fraction(q.normals[k][i]) for k in range(m)] for i in range(n)]
        K += [[Fraction(x) for x in q.normals[k]] + [Fraction(0)] * m for k in range(m)]
        rhs = [Fraction(0)] * n + [Fraction(x) for x in q.offsets]
        sol = xla.solve(K, rhs)
        x = sol[:n]
        return xla.quad(x, [[Fraction(v) for v in r] for r in q.quadric], x), x
    S = np.asarray(q.quadric, dtype=float)
    A = np.asarray(q.normals, dtype=float).T
    K = np.block([[2 * S, A], [A.T, np.zeros((m, m))]])
    rhs = np.concatenate([np.zeros(n), np.asarray(q.offsets, dtype=float)])
    x = _refined_solve(K, rhs)[:n]
    return float(x @ S.astype(np.longdouble) @ x), x.astype(float)


def key_inequality_lhs(b) -> Fraction:
    """(sigma^3 e - d)^T S^{-1} (sigma^3 e - d) for positive exact b."""
    b = _exact_positive(b)
    S, d, e = _s_d(b)
    sigma = sum(b)
    v = [sigma**3 - dj for dj in d]
    return xla.dot(v, xla.solve(S, v))


def check_key_inequality(b) -> InequalityReport:
    b = _exact_positive(b)
    sigma = sum(b)
    lhs = key_inequality_lhs(b)
    bound = KEY_BOUND * sigma**5
    return InequalityReport(b=tuple(b), sigma=sigma, lhs=lhs, bound=bound, holds=lhs < bound, margin=bound - lhs)


def _expr3(s1, bb, eSe, eSd, dSd, dd):
    return (
        s1**6 * eSe
        - 2 * s1**3 * eSd
        + dSd
        + bb
        * (
            -((eSe * s1**3 - eSd) ** 2)
            - 12 * (s1**3 - dd) * (eSe * s1**3 - eSd) / bb
            + 12 * (s1**3 - dd) ** 2 * (bb * eSe + 1) / bb**2
        )
        / (bb * eSe + 4)
    )


def _expr3_bb_zero(s1, eSe, eSd, dSd):
    # with dd substituted, (s1^3 - dd)/bb is a polynomial; at bb = 0 the
    # correction term vanishes
    return s1**6 * eSe - 2 * s1**3 * eSd + dSd


def _expr4(s, s1, bb, eSe, eSd, dSd):
    return (
        s**6 * eSe
        - 2 * s**3 * eSd
        + dSd
        + Fraction(1, 4) * bb * (7 * bb**4 - 36 * bb**3 * s1 + 72 * bb**2 * s1**2 - 72 * bb * s1**3 + 36 * s1**4)
        - bb * ((s1 - bb) ** 3 * eSe - eSd - Fraction(1, 2) * (5 * bb**2 - 12 * bb * s1 + 6 * s1**2)) ** 2 / (bb * eSe + 4)
    )


def next_d(s1, bb):
    """d_{J+1} written through sigma-tilde and b_{J+1}."""
    return s1**3 - Fraction(3, 2) * s1**2 * bb + s1 * bb**2 - Fraction(1, 4) * bb**3


def inductive_step_identity(s1, bb, eSe, eSd, dSd) -> Fraction:
    """expr3 - expr4 after substituting d_{J+1} into expr3 and sigma = s1 - bb into expr4."""
    s1, bb, eSe, eSd, dSd = (Fraction(v) for v in (s1, bb, eSe, eSd, dSd))
    if bb * eSe + 4 == 0:
        raise ZeroDivisionError("pole: b_{J+1} * eSe + 4 = 0")
    if bb == 0:
        lhs = _expr3_bb_zero(s1, eSe, eSd, dSd)
    else:
        lhs = _expr3(s1, bb, eSe, eSd, dSd, next_d(s1, bb))
    return lhs - _expr4(s1 - bb, s1, bb, eSe, eSd, dSd)


def extended_S(S, b_next):
    """[[S + b ee^T, b/2 e], [b/2 e^T, b/3]]."""
    J = len(S)
    top = [[Fraction(S[i][j]) + b_next for j in range(J)] + [b_next / 2] for i in range(J)]
    return top + [[b_next / 2] * J + [b_next / 3]]


def extended_S_inverse(S, b_next):
    """Closed-form inverse of :func:`extended_S` from the block and Sherman-Morrison formulas."""
    J = len(S)
    Sinv = xla.inverse([[Fraction(x) for x in r] for r in S])
    Se = [sum(r) for r in Sinv]
    eSe = sum(Se)
    den = 4 + b_next * eSe
    top = [[Sinv[i][j] - b_next / den * Se[i] * Se[j] for j in range(J)] + [-6 / den * Se[i]] for i in range(J)]
    corner = 12 / b_next * (1 + b_next * eSe) / den
    return top + [[-6 / den * Se[j] for j in range(J)] + [corner]]


def block_inverse_check(S, b_next):
    """S_tilde @ closed_form_inverse - I (exactly zero when the formulas are right)."""
    S = [[Fraction(x) for x in r] for r in S]
    if not is_exact(b_next) or Fraction(b_next) <= 0:
        raise CertificationError("b_next must be a positive exact rational")
    xla.require_spd(S)
    b_next = Fraction(b_next)
    St = extended_S(S, b_next)
    return xla.sub(xla.matmul(St, extended_S_inverse(S, b_next)), xla.identity(len(St)))


def cond1_cond2_agreement(b):
    """Left sides of the two rearranged forms of the Gram criterion."""
    b = _exact_positive(b)
    if len(b) < 2:
        raise CertificationError("need J >= 2")
    S, d, e = _s_d(b)
    eSe, eSd, dSd = _inner_products(S, e, d)
    det_g = eSe * dSd - eSd**2

    def form(p, q, r, s):
        # (p e + q d)^T S^{-1} (r e + s d)
        return p * r * eSe + (p * s + q * r) * eSd + q * s * dSd

    lhs1 = form(2, -5, 2, -5) - 5 * det_g
    uu = form(1, -1, 1, -1)
    lhs2 = (form(1, -1, 2, -5) ** 2 + (9 - 5 * uu) * det_g) / uu
    return lhs1, lhs2


@dataclass(frozen=True)
class InductiveChain:
    lhs_next: Fraction  # direct evaluation for (b, b_next)
    base_term: Fraction  # (sigma^3 e - d)^T S^{-1} (sigma^3 e - d) for b
    poly_term: Fraction
    negative_term: Fraction  # <= 0
    bound_next: Fraction  # 9/5 sigma_tilde^5 - 1/20 b_next^5

    @property
    def decomposition(self) -> Fraction:
        return self.base_term + self.poly_term + self.negative_term


def inductive_chain(b, b_next) -> InductiveChain:
    """Pieces of the J -> J+1 step for the key inequality.

    The inductive bound plus ``poly_term`` expands to
    ``9/5 sigma_tilde^5 - b_next^5 / 20``.
    """
    b = _exact_positive(b)
    (b_next,) = _exact_positive([b_next])
    S, d, e = _s_d(b)
    eSe, eSd, dSd = _inner_products(S, e, d)
    sigma = sum(b)
    s1 = sigma + b_next
    bb = b_next
    base = sigma**6 * eSe - 2 * sigma**3 * eSd + dSd
    poly = bb / 4 * (7 * bb**4 - 36 * bb**3 * s1 + 72 * bb**2 * s1**2 - 72 * bb * s1**3 + 36 * s1**4)
    neg = -bb * (sigma**3 * eSe - eSd - Fraction(1, 2) * (5 * bb**2 - 12 * bb * s1 + 6 * s1**2)) ** 2 / (bb * eSe + 4)
    return InductiveChain(
        lhs_next=key_inequality_lhs(b + [b_next]),
        base_term=base,
        poly_term=poly,
        negative_term=neg,
        bound_next=KEY_BOUND * s1**5 - Fraction(1, 20) * bb**5,
    )


def sample_simplex_b(rng: random.Random, J: int, scale: int = 1000) -> list:
    """Positive integers normalized to sum one (exact lattice Dirichlet)."""
    w = [rng.randint(1, scale) for _ in range(J)]
    tot = sum(w)
    return [Fraction(x, tot) for x in w]


def sample_positive_b(rng: random.Random, J: int, scale: int = 1000) -> list:
    """Positive rationals with no normalization."""
    return [Fraction(rng.randint(1, scale), rng.randint(1, scale)) for _ in range(J)]


def random_identity_point(rng: random.Random, scale: int = 50):
    while True:
        pt = [Fraction(rng.randint(-scale, scale), rng.randint(1, scale)) for _ in range(5)]
        s1, bb, eSe = pt[0], pt[1], pt[2]
        if bb * eSe + 4 != 0:
            return tuple(pt)
