"""Float inner loops: dense matrix exponential and order-5 residuals.

Every kernel is written once in numba-compatible numpy and compiled with
``numba.njit`` unless disabled (see :mod:`cfet._accel`).  The undecorated
originals stay importable as ``py_*`` so both paths can be compared.
"""
import numpy as np

from ._accel import BACKEND, jit

TAYLOR_DEGREE = 18
# scaled norm bound; the truncated tail is then below 0.5**19/19! ~ 1.6e-23
SCALED_NORM = 0.5


def py_expm_dense(M):
    """exp(M) by scaling and squaring of a degree-18 Taylor polynomial."""
    n = M.shape[0]
    norm = 0.0
    for j in range(n):
        col = 0.0
        for i in range(n):
            col += abs(M[i, j])
        if col > norm:
            norm = col
    s = 0
    while norm > SCALED_NORM:
        norm *= 0.5
        s += 1
    X = M * (0.5**s)
    E = np.zeros_like(M)
    for i in range(n):
        E[i, i] = 1.0
    P = E.copy()
    for k in range(TAYLOR_DEGREE, 0, -1):
        P = E + np.dot(X, P) / k
    for _ in range(s):
        P = np.dot(P, P)
    return P


def py_residuals_float(b, y):
    """The six order-5 residuals for float weights (same order as ResidualVector)."""
    out = np.zeros(6)
    pb = 0.0
    py = 0.0
    sb = 0.0
    sy = 0.0
    s_by = 0.0
    s_b2 = 0.0
    s_b3 = 0.0
    s_q = 0.0
    for j in range(b.shape[0]):
        bj = b[j]
        yj = y[j]
        pb += bj
        py += yj
        bh = pb - 0.5 * bj
        yh = py - 0.5 * yj
        sb += bj
        sy += yj
        s_by += bh * yj
        s_b2 += (bh * bh + bj * bj / 12.0) * yj
        s_b3 += (bh * bh * bh + 0.25 * bh * bj * bj) * yj
        s_q += (yh * yh + yj * yj / 12.0) * bj
    out[0] = sb - 1.0
    out[1] = sy - 0.5
    out[2] = s_by - 1.0 / 3.0
    out[3] = s_b2 - 0.25
    out[4] = s_b3 - 0.2
    out[5] = s_q - 0.05
    return out


expm_dense = jit(py_expm_dense)
residuals_float = jit(py_residuals_float)

__all__ = ["BACKEND", "expm_dense", "residuals_float", "py_expm_dense", "py_residuals_float"]
