"""Named problem presets for the CLI and the experiments."""
import numpy as np

from .integrator import ProblemSpec


def laplacian_1d(n: int) -> np.ndarray:
    """Dirichlet second difference on n interior points of (0, 1)."""
    h = 1.0 / (n + 1)
    A = -2.0 * np.eye(n) + np.eye(n, k=1) + np.eye(n, k=-1)
    return A / h**2


def laplacian_spectral_radius(n: int) -> float:
    h = 1.0 / (n + 1)
    return 4.0 / h**2 * np.sin(n * np.pi * h / 2) ** 2


def laplacian_top_mode(n: int) -> np.ndarray:
    x = np.arange(1, n + 1) / (n + 1)
    v = np.sin(n * np.pi * x)
    return v / np.linalg.norm(v)


def _noncommuting():
    return ProblemSpec(
        kind="special",
        A0=np.array([[0.0, 1.0], [-1.0, 0.0]]),
        A1=np.array([[1.0, 0.0], [0.0, -1.0]]),
        u0=np.array([1.0, 0.0]),
        t0=0.0,
        T=1.0,
        name="noncommuting-2x2",
    )


def _commuting():
    return ProblemSpec(
        kind="special",
        A0=np.diag([-1.0, 0.5]),
        A1=np.diag([0.3, -2.0]),
        u0=np.array([1.0, 1.0]),
        name="commuting-diag",
    )


PRESETS = {
    "noncommuting-2x2": _noncommuting,
    "commuting-diag": _commuting,
    "constant-diag": lambda: ProblemSpec(kind="constant", A=np.diag([-1.0, -2.0, 0.5]), u0=np.ones(3), name="constant-diag"),
    "zero": lambda: ProblemSpec(kind="constant", A=np.zeros((2, 2)), u0=np.array([1.0, -2.0]), name="zero"),
    "scalar-100": lambda: ProblemSpec(kind="constant", A=np.array([[-100.0]]), u0=np.array([1.0]), name="scalar-100"),
    "laplacian-64": lambda: ProblemSpec(
        kind="constant", A=laplacian_1d(64), u0=laplacian_top_mode(64), T=0.01, name="laplacian-64"
    ),
}


def get_problem(name: str) -> ProblemSpec:
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; choose from {sorted(PRESETS)}") from None
