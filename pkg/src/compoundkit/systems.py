"""System definitions: LTI, LTV (closed form or sampled) and built-in
nonlinear vector fields."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .compound import as_square
from .errors import DimensionError, PreconditionError, UnknownSystemError

LTI = "LTI"
LTV = "LTV"
NONLINEAR = "NONLINEAR"
TAGS = (LTI, LTV, NONLINEAR)


@dataclass
class SystemDef:
    """A dynamical system x' = f(t, x).

    Linear systems carry ``matrix_fn`` (t -> A(t)). Nonlinear systems carry
    the vector field ``f`` and its Jacobian ``jac``; both accept a single
    state of shape (n,) or a batch of shape (m, n).
    """

    tag: str
    n: int
    name: str = ""
    params: dict = field(default_factory=dict)
    matrix_fn: Callable[[float], np.ndarray] | None = None
    f: Callable | None = None
    jac: Callable | None = None
    box: np.ndarray | None = None
    times: np.ndarray | None = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown tag {self.tag!r}")
        if self.tag in (LTI, LTV) and self.matrix_fn is None:
            raise ValueError("linear systems need a matrix function")
        if self.tag == NONLINEAR and (self.f is None or self.jac is None):
            raise ValueError("nonlinear systems need a vector field and a Jacobian")

    @property
    def linear(self) -> bool:
        return self.tag != NONLINEAR

    def matrix(self, t: float = 0.0) -> np.ndarray:
        if not self.linear:
            raise PreconditionError(f"{self.name or 'system'} is nonlinear")
        return self.matrix_fn(t)

    def rhs(self, t: float, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.linear:
            return x @ self.matrix_fn(t).T
        return self.f(t, x)

    def jacobian(self, t: float, x=None) -> np.ndarray:
        if self.linear:
            return self.matrix_fn(t)
        return self.jac(t, np.asarray(x, dtype=float))

    def time_window(self) -> tuple[float, float] | None:
        if self.times is None:
            return None
        return float(self.times[0]), float(self.times[-1])


def linear(A, name: str = "linear") -> SystemDef:
    M = as_square(A).astype(float)
    M.setflags(write=False)
    return SystemDef(LTI, M.shape[0], name, {"A": M}, matrix_fn=lambda t: M)


def sampled_ltv(times, mats, name: str = "sampled_ltv") -> SystemDef:
    """LTV system from dense samples of A(t), linearly interpolated in time
    and held constant outside the sampled window."""
    times = np.asarray(times, dtype=float)
    mats = np.asarray(mats, dtype=float)
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise DimensionError("samples must have shape (T, n, n)")
    if times.ndim != 1 or len(times) != len(mats) or len(times) == 0:
        raise DimensionError("need one time stamp per sampled matrix")
    if np.any(np.diff(times) <= 0):
        raise DimensionError("sample times must be strictly increasing")
    if not np.all(np.isfinite(mats)):
        raise DimensionError("sampled matrices have non-finite entries")

    def matrix_fn(t):
        if t <= times[0]:
            return mats[0]
        if t >= times[-1]:
            return mats[-1]
        i = int(np.searchsorted(times, t, side="right")) - 1
        w = (t - times[i]) / (times[i + 1] - times[i])
        return (1.0 - w) * mats[i] + w * mats[i + 1]

    return SystemDef(LTV, mats.shape[1], name, {"samples": len(times)},
                     matrix_fn=matrix_fn, times=times)


def squares_ltv() -> SystemDef:
    """A(t) = [[-1, 0], [-2 cos t, 0]]."""
    def matrix_fn(t):
        return np.array([[-1.0, 0.0], [-2.0 * np.cos(t), 0.0]])
    return SystemDef(LTV, 2, "squares_ltv", {}, matrix_fn=matrix_fn)


def squares_transition(t: float) -> np.ndarray:
    """Closed-form transition matrix Phi(t, 0) of ``squares_ltv``."""
    e = np.exp(-t)
    return np.array([[e, 0.0], [-1.0 + e * (np.cos(t) - np.sin(t)), 1.0]])


def rotation(c: float = 1.0) -> SystemDef:
    A = np.array([[0.0, c], [-c, 0.0]])
    sys = linear(A, "rotation")
    sys.params = {"c": float(c)}
    return sys


def thomas(b: float = 0.1, c: float = 0.0) -> SystemDef:
    """Cyclically symmetric Thomas system with optional partial-state
    feedback u = c diag(1, 1, 0) x."""
    b = float(b)
    c = float(c)
    gain = np.array([c, c, 0.0])

    def f(t, x):
        x = np.asarray(x, dtype=float)
        s = np.sin(x)
        return np.roll(s, -1, axis=-1) - b * x + gain * x

    def jac(t, x):
        x = np.asarray(x, dtype=float)
        cs = np.cos(x)
        J = np.diag(gain - b)
        J[0, 1] = cs[1]
        J[1, 2] = cs[2]
        J[2, 0] = cs[0]
        return J

    box = None
    if b > 0:
        box = np.array([[-1.0 / b, 1.0 / b]] * 3)
    return SystemDef(NONLINEAR, 3, "thomas", {"b": b, "c": c}, f=f, jac=jac, box=box)


def nonlinear_from_linear(A, name: str = "linear_as_nonlinear") -> SystemDef:
    """Wrap an LTI matrix as a NONLINEAR system with constant Jacobian."""
    M = as_square(A).astype(float)
    return SystemDef(NONLINEAR, M.shape[0], name, {"A": M},
                     f=lambda t, x: np.asarray(x, dtype=float) @ M.T,
                     jac=lambda t, x: M.copy())


def laplacian(n: int, edges, weights=None) -> np.ndarray:
    """Weighted Laplacian; edge (i, j) (1-based) means node i listens to j."""
    L = np.zeros((n, n))
    edges = list(edges)
    if weights is None:
        weights = [1.0] * len(edges)
    if len(weights) != len(edges):
        raise DimensionError("one weight per edge required")
    for (i, j), w in zip(edges, weights):
        if not (1 <= i <= n and 1 <= j <= n) or i == j:
            raise DimensionError(f"invalid edge ({i},{j})")
        if w <= 0:
            raise PreconditionError("edge weights must be positive")
        L[i - 1, j - 1] -= w
        L[i - 1, i - 1] += w
    return L


def globally_reachable_vertices(n: int, edges) -> list[int]:
    """Vertices reachable from every vertex along the directed edges."""
    adj = np.eye(n, dtype=bool)
    for i, j in edges:
        adj[i - 1, j - 1] = True
    reach = adj.copy()
    for _ in range(max(1, int(np.ceil(np.log2(max(n, 2)))) + 1)):
        reach = reach | ((reach.astype(int) @ reach.astype(int)) > 0)
    return [v + 1 for v in range(n) if reach[:, v].all()]


def consensus_laplacian(n: int, edges, weights=None) -> SystemDef:
    """x' = -L x for a graph that must have a globally reachable vertex."""
    edges = [tuple(int(v) for v in e) for e in edges]
    roots = globally_reachable_vertices(n, edges)
    if not roots:
        raise PreconditionError("graph has no globally reachable vertex")
    L = laplacian(n, edges, weights)
    sys = linear(-L, "consensus_laplacian")
    sys.params = {"edges": edges, "weights": list(weights) if weights is not None else None,
                  "roots": roots}
    return sys


BUILTINS = {
    "thomas": thomas,
    "squares_ltv": squares_ltv,
    "rotation": rotation,
    "consensus_laplacian": consensus_laplacian,
}


def builtin(name: str, **params) -> SystemDef:
    key = name.lower().replace("-", "_")
    if key not in BUILTINS:
        raise UnknownSystemError(f"unknown built-in system {name!r}; "
                                 f"known: {sorted(BUILTINS)}")
    return BUILTINS[key](**params)
