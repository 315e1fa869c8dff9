"""Numerical engine: matrix-exponential actions, stepping and order studies."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .kernels import expm_dense
from .scheme import Scheme, bundled_scheme

log = logging.getLogger(__name__)

DENSE_MAX_DIM = 256
KRYLOV_MAX_DIM = 40
KRYLOV_TOL = 1e-12
KRYLOV_MAX_SUBSTEPS = 4096


class IntegrationError(RuntimeError):
    """Iterative exponential or reference solver failed to converge."""


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """u' = A(t) u on [t0, T].

    ``kind`` is ``"constant"`` (matrix ``A``), ``"special"`` (``A0 + t A1``)
    or ``"callback"`` (``func(t)`` returns the matrix).
    """

    kind: str
    u0: np.ndarray
    t0: float = 0.0
    T: float = 1.0
    A: Optional[np.ndarray] = None
    A0: Optional[np.ndarray] = None
    A1: Optional[np.ndarray] = None
    func: Optional[Callable] = None
    name: str = ""

    def __post_init__(self):
        u0 = np.atleast_1d(np.asarray(self.u0))
        object.__setattr__(self, "u0", u0)
        d = u0.shape[0]
        if d < 1:
            raise ValueError("dimension must be >= 1")
        if not self.T > self.t0:
            raise ValueError("need T > t0")
        mats = {"constant": ("A",), "special": ("A0", "A1"), "callback": ()}
        if self.kind not in mats:
            raise ValueError(f"unknown problem kind {self.kind!r}")
        for key in mats[self.kind]:
            M = getattr(self, key)
            if M is None:
                raise ValueError(f"{self.kind} problem needs {key}")
            M = np.atleast_2d(np.asarray(M))
            if M.shape != (d, d):
                raise ValueError(f"{key} must be {d}x{d}")
            object.__setattr__(self, key, M)
        if self.kind == "callback" and self.func is None:
            raise ValueError("callback problem needs func")

    @property
    def dim(self) -> int:
        return self.u0.shape[0]

    def generator(self, t):
        if self.kind == "constant":
            return self.A
        if self.kind == "special":
            return self.A0 + t * self.A1
        return np.asarray(self.func(t))

    def dtype(self):
        mats = [self.u0] + [m for m in (self.A, self.A0, self.A1) if m is not None]
        if self.kind == "callback":
            mats.append(self.generator(self.t0))
        return np.result_type(*mats, np.float64)


@dataclass
class StepContext:
    scheme: Scheme
    tau: float
    t_n: float
    B: list


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    last_step_shortened: bool = False

    @property
    def final(self):
        return self.states[-1]


@dataclass
class ConvergenceReport:
    taus: list
    errors: list
    observed_orders: list
    fitted_order: Optional[float]
    exact: bool = False
    reference_accuracy: float = 0.0
    excluded: list = field(default_factory=list)
    stability_threshold: Optional[float] = None
    notes: list = field(default_factory=list)

    def csv_rows(self):
        rows = [("tau", "error", "observed_order")]
        for i, (tau, err) in enumerate(zip(self.taus, self.errors)):
            p = "" if i == 0 or self.observed_orders[i - 1] is None else repr(self.observed_orders[i - 1])
            rows.append((repr(tau), repr(err), p))
        return rows


@lru_cache(maxsize=64)
def scheme_arrays(s: Scheme):
    """Float views (a, c, b, y) of a scheme."""
    a = np.array([[float(x) for x in row] for row in s.a])
    c = np.array([float(x) for x in s.c])
    return a, c, a.sum(axis=1), a @ c


def _krylov_expv(M, v, t, m_max, tol, max_substeps):
    w = v.copy()
    remaining = float(t)
    h = remaining
    substeps = 0
    anorm = np.linalg.norm(M, 1)
    while remaining != 0.0:
        beta = np.linalg.norm(w)
        if beta == 0.0:
            return w
        n = w.shape[0]
        m_cap = min(m_max, n)
        V = np.zeros((n, m_cap + 1), dtype=w.dtype)
        H = np.zeros((m_cap + 1, m_cap), dtype=w.dtype)
        V[:, 0] = w / beta
        h = remaining if abs(h) > abs(remaining) else h
        k_used = m_cap
        happy = False
        for k in range(m_cap):
            z = M @ V[:, k]
            for i in range(k + 1):
                H[i, k] = np.vdot(V[:, i], z)
                z = z - H[i, k] * V[:, i]
            hk = np.linalg.norm(z)
            H[k + 1, k] = hk
            if hk <= 1e-14 * max(anorm, 1.0):
                k_used, happy = k + 1, True
                break
            V[:, k + 1] = z / hk
            E = expm_dense(h * H[: k + 1, : k + 1])
            if hk * abs(E[k, 0]) <= tol:
                k_used = k + 1
                break
        Hk = H[:k_used, :k_used]
        while True:
            E = expm_dense(h * Hk)
            if happy or H[k_used, k_used - 1] * abs(E[k_used - 1, 0]) <= tol:
                break
            h *= 0.5
            substeps += 1
            if substeps > max_substeps:
                raise IntegrationError("Krylov exponential did not converge within the substep budget")
        w = beta * (V[:, :k_used] @ E[:, 0])
        remaining -= h
        if abs(remaining) <= 1e-15 * abs(t):
            remaining = 0.0
    return w


def expm_action(M, v, t=1.0, method="auto", dense_max_dim=DENSE_MAX_DIM, krylov_dim=KRYLOV_MAX_DIM, tol=KRYLOV_TOL):
    """exp(t M) v.

    Dense scaling-and-squaring for ``d <= dense_max_dim``, Arnoldi with a
    residual stop and time substepping above (or when ``method="krylov"``).
    """
    M = np.atleast_2d(np.asarray(M))
    v = np.asarray(v)
    dtype = np.result_type(M, v, np.float64)
    M = M.astype(dtype, copy=False)
    v = v.astype(dtype, copy=False)
    if not (np.all(np.isfinite(M)) and np.all(np.isfinite(v))):
        raise ValueError("non-finite input")
    if t == 0 or not M.any():
        return v.copy()
    use_krylov = method == "krylov" or (method == "auto" and M.shape[0] > dense_max_dim)
    if use_krylov:
        return _krylov_expv(M, v, t, krylov_dim, tol, KRYLOV_MAX_SUBSTEPS)
    return expm_dense(np.ascontiguousarray(t * M)) @ v


def step_matrices(s: Scheme, p: ProblemSpec, t_n, tau, form="auto"):
    """B_1..B_J for one step; ``form="nodes"`` forces the quadrature sum."""
    a, c, b, y = scheme_arrays(s)
    if p.kind == "constant" and form != "nodes":
        return [bj * p.A for bj in b]
    if p.kind == "special" and form != "nodes":
        base = p.A0 + t_n * p.A1
        return [bj * base + tau * yj * p.A1 for bj, yj in zip(b, y)]
    G = [p.generator(t_n + ck * tau) for ck in c]
    return [sum(a[j, k] * G[k] for k in range(len(c))) for j in range(s.J)]


def step_context(s: Scheme, p: ProblemSpec, t_n, tau) -> StepContext:
    return StepContext(scheme=s, tau=tau, t_n=t_n, B=step_matrices(s, p, t_n, tau))


def step(s: Scheme, p: ProblemSpec, t_n, tau, u, form="auto"):
    """u_{n+1} = exp(tau B_J) ... exp(tau B_1) u_n."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    u = np.asarray(u, dtype=p.dtype())
    for B in step_matrices(s, p, t_n, tau, form):
        u = expm_action(B, u, tau)
    return u


def _grid(t0, T, tau):
    n = int(np.floor((T - t0) / tau))
    rest = (T - t0) - n * tau
    if rest <= 1e-10 * tau:
        return n, 0.0
    return n, rest


def integrate(s: Scheme, p: ProblemSpec, tau, max_steps=10**6, store=True) -> Trajectory:
    """Uniform grid t_n = t0 + n tau; a final shortened step lands exactly on T."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    n, rest = _grid(p.t0, p.T, tau)
    if n + (rest > 0) > max_steps:
        raise ValueError(f"{n} steps exceed the grid budget of {max_steps}")
    u = p.u0.astype(p.dtype())
    times, states = [p.t0], [u]
    for i in range(n):
        t = p.t0 + i * tau
        u = step(s, p, t, tau, u)
        if store:
            times.append(p.t0 + (i + 1) * tau)
            states.append(u)
    if rest > 0:
        u = step(s, p, p.t0 + n * tau, rest, u)
        if store:
            times.append(p.T)
            states.append(u)
    if not store:
        times, states = [p.t0, p.T], [p.u0.astype(u.dtype), u]
    else:
        times[-1] = p.T
    return Trajectory(np.array(times), np.array(states), last_step_shortened=rest > 0)


@dataclass
class ReferenceResult:
    value: np.ndarray
    accuracy: float
    steps: int


def reference_solution(p: ProblemSpec, t=None, tol=1e-12, scheme: Optional[Scheme] = None, n0=8, max_halvings=18):
    """Step-halving with Richardson extrapolation of the order-4 bundled scheme.

    Stops when two successive extrapolated values differ by less than ``tol``
    (2-norm); that difference is returned as the accuracy estimate.
    """
    if tol < 1e-13:
        raise ValueError("tol must be >= 1e-13")
    scheme = scheme or bundled_scheme("cf4")
    order = 4
    q = p if t is None or t == p.T else replace(p, T=t)
    span = q.T - q.t0
    prev_u = prev_ext = None
    n = n0
    for _ in range(max_halvings + 1):
        u = integrate(scheme, q, span / n, store=False).final
        if prev_u is not None:
            ext = u + (u - prev_u) / (2**order - 1)
            if prev_ext is not None:
                est = float(np.linalg.norm(ext - prev_ext))
                if est < tol:
                    return ReferenceResult(ext, est, n)
            prev_ext = ext
        prev_u = u
        n *= 2
    raise IntegrationError(f"reference tolerance {tol:g} not reached within {max_halvings} halvings")


def _stability_threshold(taus, errors):
    # largest tau such that errors are non-increasing as tau decreases from there
    order = np.argsort(taus)
    ts, es = np.asarray(taus)[order], np.asarray(errors)[order]
    thr = ts[0]
    for i in range(1, len(ts)):
        if es[i] >= es[i - 1]:
            thr = ts[i]
        else:
            break
    return float(thr)


def empirical_order(s: Scheme, p: ProblemSpec, taus, ref_tol=1e-13, reference=None) -> ConvergenceReport:
    taus = [float(t) for t in taus]
    if len(taus) < 4:
        raise ValueError("need at least 4 step sizes")
    ratios = np.array(taus[:-1]) / np.array(taus[1:])
    if not np.allclose(ratios, 2.0):
        raise ValueError("step sizes must form a geometric sequence with ratio 2")
    ref = reference or reference_solution(p, tol=ref_tol)
    errors = [float(np.linalg.norm(integrate(s, p, tau, store=False).final - ref.value)) for tau in taus]
    floor = 100 * ref.accuracy
    keep = [i for i, e in enumerate(errors) if e > floor]
    excluded = [taus[i] for i in range(len(taus)) if i not in keep]
    notes = []
    if excluded:
        notes.append(f"excluded {len(excluded)} step sizes with error <= 100x reference accuracy ({floor:.3g})")
    observed = []
    for i in range(1, len(taus)):
        if i in keep and i - 1 in keep:
            observed.append(float(np.log(errors[i - 1] / errors[i]) / np.log(2)))
        else:
            observed.append(None)
    exact = not keep and all(e == 0 for e in errors)
    fitted = None
    if len(keep) >= 2:
        fitted = float(np.polyfit(np.log([taus[i] for i in keep]), np.log([errors[i] for i in keep]), 1)[0])
    elif not exact:
        notes.append("fewer than two usable step sizes; no fitted order")
    return ConvergenceReport(
        taus=taus,
        errors=errors,
        observed_orders=observed,
        fitted_order=fitted,
        exact=exact,
        reference_accuracy=ref.accuracy,
        excluded=excluded,
        stability_threshold=_stability_threshold(taus, errors),
        notes=notes,
    )


def amplification_probe(s: Scheme, p: ProblemSpec, tau, t_n=None, u=None):
    """||v_j|| / ||v_{j-1}|| for the J intermediate vectors of one step."""
    t_n = p.t0 if t_n is None else t_n
    v = np.asarray(p.u0 if u is None else u, dtype=p.dtype())
    factors = []
    for B in step_matrices(s, p, t_n, tau):
        w = expm_action(B, v, tau)
        nv = np.linalg.norm(v)
        factors.append(float(np.linalg.norm(w) / nv) if nv > 0 else 1.0)
        v = w
    return factors
