"""Fixed-step RK4 propagation of states, transition matrices, compound
systems and parallelotope volumes."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .compound import add_compound, as_matrix, as_square, mult_compound
from .errors import DimensionError, IntegrationError, PreconditionError
from .sign_tools import s_minus, s_minus_batch, s_plus_batch
from .systems import SystemDef
from .verdict import Verdict

DEFAULT_STEP = 1e-3
EQUILIBRIUM_TOL = 1e-6
GL_NODES = 16


@dataclass
class Trajectory:
    """Uniformly stepped solution; ``states`` has shape (len(times), ...)."""

    times: np.ndarray
    states: np.ndarray
    h: float
    method: str = "RK4"

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _grid(t_span, h):
    t0, t1 = (float(v) for v in t_span)
    if not (np.isfinite(t0) and np.isfinite(t1)):
        raise PreconditionError("t_span must be finite")
    if not h > 0:
        raise PreconditionError("step h must be positive")
    if t1 < t0:
        raise PreconditionError("t_span must be increasing")
    steps = int(round((t1 - t0) / h)) if t1 > t0 else 0
    if t1 > t0:
        steps = max(steps, 1)
        h = (t1 - t0) / steps
    return t0, t1, steps, h


def rk4(fun: Callable, y0, t_span, h: float = DEFAULT_STEP, store_every: int = 1) -> Trajectory:
    """Classical RK4 for y' = fun(t, y) on arrays of any shape.

    The step is adjusted so that it divides the interval evenly; states are
    stored every ``store_every`` steps plus the final one.
    """
    t0, t1, steps, h = _grid(t_span, h)
    store_every = max(1, int(store_every))
    y = np.array(y0, dtype=float)
    times = [t0]
    states = [y.copy()]
    t = t0
    for i in range(1, steps + 1):
        k1 = fun(t, y)
        k2 = fun(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = fun(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = fun(t + h, y + h * k3)
        y_next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y_next)):
            raise IntegrationError(f"non-finite state after t={t:.6g}", last_time=t)
        y = y_next
        t = t0 + i * h
        if i % store_every == 0 or i == steps:
            times.append(t)
            states.append(y.copy())
    return Trajectory(np.asarray(times), np.asarray(states), h)


def integrate(sys: SystemDef, x0, t_span, h: float = DEFAULT_STEP, store_every: int = 1) -> Trajectory:
    x0 = np.ravel(np.asarray(x0, dtype=float))
    if x0.size != sys.n:
        raise DimensionError(f"x0 must have length {sys.n}")
    return rk4(sys.rhs, x0, t_span, h, store_every)


def integrate_many(sys: SystemDef, X0, t_span, h: float = DEFAULT_STEP,
                   store_every: int = 1) -> Trajectory:
    """Integrate several initial conditions (rows of X0) in one batch;
    ``states`` has shape (T, m, n)."""
    X0 = np.atleast_2d(np.asarray(X0, dtype=float))
    if X0.shape[1] != sys.n:
        raise DimensionError(f"initial conditions must have {sys.n} columns")
    return rk4(sys.rhs, X0, t_span, h, store_every)


def _require_linear(sys):
    if not sys.linear:
        raise PreconditionError("operation needs an LTI or LTV system")


def transition_matrix(sys: SystemDef, t0: float, t1: float, h: float = DEFAULT_STEP) -> np.ndarray:
    """Phi(t1, t0) from Phi' = A(t) Phi, Phi(t0) = I."""
    _require_linear(sys)
    if t1 == t0:
        return np.eye(sys.n)
    traj = rk4(lambda t, P: sys.matrix(t) @ P, np.eye(sys.n), (t0, t1), h,
               store_every=10**9)
    return traj.final


def _frame(X0, n):
    X0 = as_matrix(X0, "X0").astype(float)
    if X0.shape[0] != n:
        raise DimensionError(f"frame must have {n} rows")
    if X0.shape[1] > n:
        raise DimensionError("frame has more columns than the state dimension")
    return X0


def compound_propagate(sys: SystemDef, k: int, X0, t_span, h: float = DEFAULT_STEP,
                       x_base=None, store_every: int = 1) -> Trajectory:
    """Integrate y' = A^[k](t) y from y(0) = X0^(k).

    For nonlinear systems A(t) is the Jacobian along the base trajectory
    from ``x_base``; the state is then (x, y) and only y is returned.
    """
    X0 = _frame(X0, sys.n)
    if X0.shape[1] != k:
        raise DimensionError("X0 must have k columns")
    y0 = mult_compound(X0, k)[:, 0]
    if sys.linear:
        return rk4(lambda t, y: add_compound(sys.matrix(t), k) @ y, y0, t_span, h, store_every)
    if x_base is None:
        raise PreconditionError("nonlinear systems need a base point x_base")
    xb = np.ravel(np.asarray(x_base, dtype=float))
    n = sys.n

    def fun(t, z):
        x = z[:n]
        return np.concatenate([sys.rhs(t, x), add_compound(sys.jacobian(t, x), k) @ z[n:]])

    traj = rk4(fun, np.concatenate([xb, y0]), t_span, h, store_every)
    return Trajectory(traj.times, traj.states[:, n:], traj.h)


def propagate_frame(sys: SystemDef, X0, t_span, h: float = DEFAULT_STEP, x_base=None,
                    store_every: int = 1) -> Trajectory:
    """Propagate each column of X0; states have shape (T, n, k).

    Linear systems move the columns as solutions; nonlinear systems move
    them as tangent vectors along the base trajectory from ``x_base``.
    """
    X0 = _frame(X0, sys.n)
    if sys.linear:
        return rk4(lambda t, W: sys.matrix(t) @ W, X0, t_span, h, store_every)
    if x_base is None:
        raise PreconditionError("nonlinear systems need a base point x_base")
    n = sys.n

    def fun(t, Z):
        x = Z[:, 0]
        return np.column_stack([sys.rhs(t, x), sys.jacobian(t, x) @ Z[:, 1:]])

    Z0 = np.column_stack([np.ravel(np.asarray(x_base, dtype=float)), X0])
    traj = rk4(fun, Z0, t_span, h, store_every)
    return Trajectory(traj.times, traj.states[:, :, 1:], traj.h)


def volume_evolution(sys: SystemDef, X0, t_span, h: float = DEFAULT_STEP, x_base=None,
                     store_every: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """(times, volumes) of the parallelotope spanned by the propagated frame."""
    X0 = _frame(X0, sys.n)
    traj = compound_propagate(sys, X0.shape[1], X0, t_span, h, x_base, store_every)
    return traj.times, np.linalg.norm(traj.states, axis=1)


def variational_matrix(sys: SystemDef, a, b, t: float = 0.0, h: float = DEFAULT_STEP,
                       nodes: int = GL_NODES) -> np.ndarray:
    """Average of the Jacobian along the segment from x(t, b) to x(t, a),
    by Gauss-Legendre quadrature on [0, 1]."""
    if sys.jac is None and not sys.linear:
        raise PreconditionError("system has no Jacobian")
    a = np.ravel(np.asarray(a, dtype=float))
    b = np.ravel(np.asarray(b, dtype=float))
    if a.size != sys.n or b.size != sys.n:
        raise DimensionError(f"points must have length {sys.n}")
    if t > 0:
        end = integrate_many(sys, np.vstack([a, b]), (0.0, t), h, store_every=10**9).final
        a, b = end[0], end[1]
    s, w = np.polynomial.legendre.leggauss(nodes)
    s = 0.5 * (s + 1.0)
    w = 0.5 * w
    out = np.zeros((sys.n, sys.n))
    for si, wi in zip(s, w):
        out += wi * sys.jacobian(t, b + si * (a - b))
    return out


def forced_compound_derivative(A, X, F) -> np.ndarray:
    """A^[k] X^(k) plus the k compounds of X with column i replaced by F[:, i]."""
    A = as_square(A)
    X = as_matrix(X, "X")
    F = as_matrix(F, "F")
    n, k = X.shape
    if A.shape[0] != n or F.shape != X.shape:
        raise DimensionError("A must be n x n and F must match X")
    out = add_compound(A, k) @ mult_compound(X, k)[:, 0]
    for i in range(k):
        Y = X.copy()
        Y[:, i] = F[:, i]
        out = out + mult_compound(Y, k)[:, 0]
    return out


def thomas_gain_designer(b: float, s: float) -> float:
    """Supremum c* of feedback gains that make the controlled Thomas system
    (2+s)-contracting in the L1 sense: (s(b+1) + 2b - 1) / (1 + s)."""
    if not b > 0:
        raise PreconditionError("b must be positive")
    if not 0.0 <= s < 1.0:
        raise PreconditionError("s must lie in [0, 1)")
    return (s * (b + 1.0) + 2.0 * b - 1.0) / (1.0 + s)


def final_speed(sys: SystemDef, traj: Trajectory, window: float = 0.1) -> np.ndarray:
    """max ||f(x)||_inf over the last ``window`` fraction of the time span,
    one value per trajectory in the batch."""
    t0, t1 = traj.times[0], traj.times[-1]
    mask = traj.times >= t1 - window * (t1 - t0)
    speeds = [np.max(np.abs(sys.rhs(t, x)), axis=-1) for t, x in
              zip(traj.times[mask], traj.states[mask])]
    return np.max(np.asarray(speeds), axis=0)


def equilibrium_verdict(sys: SystemDef, traj: Trajectory, tol: float = EQUILIBRIUM_TOL,
                        window: float = 0.1) -> Verdict:
    speed = np.atleast_1d(final_speed(sys, traj, window))
    worst = float(speed.max())
    return Verdict("equilibrium", worst < tol, margin=tol - worst,
                   witness={"final_window_speed": speed, "window": window,
                            "final_state": traj.final},
                   tolerances={"speed": tol})


def cone_invariance_sim(sys: SystemDef, a, b, k: int, t_span, h: float = DEFAULT_STEP,
                        store_every: int = 10, rel_zero: float = 1e-9) -> Verdict:
    """Simulate from a and b and check s-(x(t,a) - x(t,b)) <= k-1 at every
    stored time; entries below rel_zero * ||z||_inf count as zero."""
    a = np.ravel(np.asarray(a, dtype=float))
    b = np.ravel(np.asarray(b, dtype=float))
    if s_minus(a - b) > k - 1:
        raise PreconditionError("a - b must lie in P^k_- (at most k-1 sign changes)")
    traj = integrate_many(sys, np.vstack([a, b]), t_span, h, store_every)
    Z = traj.states[:, 0, :] - traj.states[:, 1, :]
    scale = np.max(np.abs(Z), axis=1, keepdims=True)
    Zc = np.where(np.abs(Z) <= rel_zero * scale, 0.0, Z)
    counts = s_minus_batch(Zc)
    bad = np.flatnonzero(counts > k - 1)
    witness = {"k": k, "max_s_minus": int(counts.max()), "samples": int(counts.size),
               "s_minus_series": counts, "s_plus_series": s_plus_batch(Zc)}
    if bad.size:
        witness["first_violation_time"] = float(traj.times[bad[0]])
    return Verdict("cone_invariance", bad.size == 0, witness=witness,
                   tolerances={"relative_zero": rel_zero, "h": traj.h},
                   notes=["simulation-based check at stored sample times"])
