"""The six order-5 conditions for u' = (A0 + t A1) u and their quadric form."""
from __future__ import annotations

from dataclasses import astuple, dataclass, fields
from fractions import Fraction

from .scalars import Scalar, is_exact, to_json_scalar
from .scheme import DerivedCoefficients

RHS = {
    "r_sum_b": Fraction(1),
    "r_sum_y": Fraction(1, 2),
    "r_bhat_y": Fraction(1, 3),
    "r_bhat2": Fraction(1, 4),
    "r_bhat3": Fraction(1, 5),
    "r_quad": Fraction(1, 20),
}

# residuals that must vanish for each order (cumulative)
ORDER_LADDER = (
    (1, ("r_sum_b",)),
    (2, ("r_sum_y",)),
    (3, ("r_bhat_y",)),
    (4, ("r_bhat2",)),
    (5, ("r_bhat3", "r_quad")),
)


@dataclass(frozen=True)
class ResidualVector:
    """Left side minus right side of each condition."""

    r_sum_b: Scalar
    r_sum_y: Scalar
    r_bhat_y: Scalar
    r_bhat2: Scalar
    r_bhat3: Scalar
    r_quad: Scalar

    def as_tuple(self):
        return astuple(self)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @property
    def exact(self):
        return all(is_exact(v) for v in self.as_tuple())


@dataclass(frozen=True)
class QuadricSystem:
    e: tuple
    d: tuple
    S: tuple
    rhs: tuple = (Fraction(1, 2), Fraction(1, 5), Fraction(1, 20))


def _zero(dc):
    return Fraction(0) if dc.exact else 0.0


def residuals_order5(dc: DerivedCoefficients) -> ResidualVector:
    z = _zero(dc)
    b, y, bh, yh = dc.b, dc.y, dc.bhat, dc.yhat
    J = dc.J
    sums = (
        sum(b, z),
        sum(y, z),
        sum((bh[j] * y[j] for j in range(J)), z),
        sum(((bh[j] ** 2 + b[j] ** 2 / 12) * y[j] for j in range(J)), z),
        sum(((bh[j] ** 3 + bh[j] * b[j] ** 2 / 4) * y[j] for j in range(J)), z),
        sum(((yh[j] ** 2 + y[j] ** 2 / 12) * b[j] for j in range(J)), z),
    )
    rhs = tuple(RHS.values()) if dc.exact else tuple(float(v) for v in RHS.values())
    return ResidualVector(*(s - r for s, r in zip(sums, rhs)))


def order_achieved(dc_or_residuals, tol=0) -> int:
    """Largest p <= 5 whose cumulative residual set is within ``tol`` (absolute).

    These are necessary conditions derived for the linear-in-t problem class;
    a passing value is not a full order proof for general A(t).
    """
    r = dc_or_residuals if isinstance(dc_or_residuals, ResidualVector) else residuals_order5(dc_or_residuals)
    p = 0
    for order, names in ORDER_LADDER:
        if all(abs(getattr(r, n)) <= tol for n in names):
            p = order
        else:
            break
    return p


def quadric_system(dc: DerivedCoefficients) -> QuadricSystem:
    return QuadricSystem(e=dc.e, d=dc.d, S=dc.S)


def quadric_residuals(dc: DerivedCoefficients):
    """(e^T y - 1/2, d^T y - 1/5, y^T S y - 1/20)."""
    z = _zero(dc)
    J, y = dc.J, dc.y
    ey = sum(y, z)
    dy = sum((dc.d[j] * y[j] for j in range(J)), z)
    ySy = sum((y[i] * dc.S[i][j] * y[j] for i in range(J) for j in range(J)), z)
    c = (Fraction(1, 2), Fraction(1, 5), Fraction(1, 20))
    if not dc.exact:
        c = tuple(map(float, c))
    return (ey - c[0], dy - c[1], ySy - c[2])


def residual_report(name: str, dc: DerivedCoefficients, tol=0) -> dict:
    r = residuals_order5(dc)
    return {
        "scheme": name,
        "exact": r.exact,
        "residuals": {k: to_json_scalar(v) for k, v in r.as_dict().items()},
        "order_achieved": order_achieved(r, tol),
    }
