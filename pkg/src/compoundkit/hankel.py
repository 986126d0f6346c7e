"""Hankel k-positivity of discrete-time SISO LTI systems."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .compound import as_square, det_batch
from .errors import DimensionError, HorizonError, PreconditionError
from .sign_tools import nonzero_end_signs, s_minus_batch
from .verdict import Verdict

DEFAULT_HORIZON = 200
MINOR_TOL = 1e-9
TAIL_TOL = 1e-9


@dataclass
class HankelSystem:
    """Realization x(j+1) = A x(j) + b u(j), y(j) = c^T x(j)."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    N: int = DEFAULT_HORIZON

    def __post_init__(self):
        self.A = as_square(self.A).astype(float)
        n = self.A.shape[0]
        self.b = np.ravel(np.asarray(self.b, dtype=float))
        self.c = np.ravel(np.asarray(self.c, dtype=float))
        if self.b.size != n or self.c.size != n:
            raise DimensionError(f"b and c must have length {n}")
        if int(self.N) < 1:
            raise PreconditionError("horizon must be positive")
        self.N = int(self.N)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.A))))

    def stable(self) -> bool:
        return self.spectral_radius() < 1.0

    def tail_bound(self, N: int | None = None) -> float:
        """||c|| ||b|| rho^N / (1 - rho); infinite when rho >= 1."""
        rho = self.spectral_radius()
        if rho >= 1.0:
            return float("inf")
        N = self.N if N is None else N
        return float(np.linalg.norm(self.c) * np.linalg.norm(self.b) * rho ** N / (1.0 - rho))


def first_order_lag(p: float, r: float, N: int = DEFAULT_HORIZON) -> HankelSystem:
    """Realization of r / (z - p)."""
    return HankelSystem(np.array([[p]]), np.array([1.0]), np.array([r]), N)


def parallel_lags(poles, residues, N: int = DEFAULT_HORIZON) -> HankelSystem:
    """Diagonal realization of sum_i r_i / (z - p_i)."""
    poles = np.ravel(np.asarray(poles, dtype=float))
    residues = np.ravel(np.asarray(residues, dtype=float))
    if poles.shape != residues.shape:
        raise DimensionError("one residue per pole required")
    return HankelSystem(np.diag(poles), np.ones_like(poles), residues, N)


def parallel(s1: HankelSystem, s2: HankelSystem) -> HankelSystem:
    """Block-diagonal realization of the parallel interconnection."""
    n1, n2 = s1.n, s2.n
    A = np.zeros((n1 + n2, n1 + n2))
    A[:n1, :n1] = s1.A
    A[n1:, n1:] = s2.A
    return HankelSystem(A, np.concatenate([s1.b, s2.b]), np.concatenate([s1.c, s2.c]),
                        min(s1.N, s2.N))


@dataclass
class ImpulseResponse:
    """Samples g(1), ..., g(N); ``samples[j-1]`` holds g(j)."""

    samples: np.ndarray
    source: str = "explicit"
    system: HankelSystem | None = None

    def __post_init__(self):
        self.samples = np.ravel(np.asarray(self.samples, dtype=float))
        if self.samples.size == 0:
            raise DimensionError("impulse response is empty")
        if not np.all(np.isfinite(self.samples)):
            raise DimensionError("impulse response has non-finite samples")

    @property
    def N(self) -> int:
        return self.samples.size

    def __call__(self, j: int) -> float:
        if not 1 <= j <= self.N:
            raise HorizonError(f"g({j}) outside the stored horizon 1..{self.N}")
        return float(self.samples[j - 1])

    def __add__(self, other: "ImpulseResponse") -> "ImpulseResponse":
        N = min(self.N, other.N)
        return ImpulseResponse(self.samples[:N] + other.samples[:N], "sum")


def impulse_response(sys: HankelSystem, N: int | None = None) -> ImpulseResponse:
    """g(j) = c^T A^{j-1} b for j = 1..N."""
    N = sys.N if N is None else int(N)
    if N < 1:
        raise PreconditionError("N must be positive")
    g = np.empty(N)
    v = sys.b.copy()
    for j in range(N):
        g[j] = sys.c @ v
        v = sys.A @ v
    return ImpulseResponse(g, "realization", sys)


def hankel_block(g: ImpulseResponse, p: int, q: int) -> np.ndarray:
    """H_g(p, q): q x q block with (i, j) entry g(p + i + j), 0-based i, j."""
    if p < 1 or q < 1:
        raise DimensionError("p and q must be positive")
    if p + 2 * q - 2 > g.N:
        raise HorizonError(f"H_g({p},{q}) needs g up to {p + 2 * q - 2}, horizon is {g.N}")
    i, j = np.indices((q, q))
    return g.samples[p - 1 + i + j]


def controllability(A, b, q: int) -> np.ndarray:
    cols = [np.asarray(b, dtype=float)]
    for _ in range(q - 1):
        cols.append(A @ cols[-1])
    return np.column_stack(cols)


def observability(A, c, q: int) -> np.ndarray:
    return controllability(np.asarray(A).T, c, q).T


def realization_block(sys: HankelSystem, p: int, q: int) -> np.ndarray:
    """O^q(A, c) A^{p-1} C^q(A, b)."""
    return observability(sys.A, sys.c, q) @ np.linalg.matrix_power(sys.A, p - 1) \
        @ controllability(sys.A, sys.b, q)


def hankel_compound_ir(g: ImpulseResponse, k: int, up_to_j: int | None = None) -> ImpulseResponse:
    """g^(k)(j) = det H_g(j, k) for j = 1..up_to_j."""
    if k < 1:
        raise DimensionError("k must be positive")
    max_j = g.N - 2 * k + 2
    if up_to_j is None:
        up_to_j = max_j
    if up_to_j < 1 or up_to_j > max_j:
        raise HorizonError(f"g^({k}) available for j <= {max_j}, requested {up_to_j}")
    j = np.arange(up_to_j)[:, None, None]
    a, b = np.indices((k, k))
    blocks = g.samples[j + a + b]
    return ImpulseResponse(det_batch(blocks), f"compound_{k}")


def hankel_k_positive_verdict(sys, k: int, N: int | None = None, tol: float = MINOR_TOL,
                              tail_tol: float = TAIL_TOL) -> Verdict:
    """Check g^(j) >= -tol for every order j <= k over the truncated horizon.

    ``sys`` may be a HankelSystem (stability and the geometric tail bound are
    enforced) or an explicit ImpulseResponse (finite-sequence check only).
    """
    notes = []
    tolerances = {"minor": tol}
    witness = {"k": k}
    if isinstance(sys, HankelSystem):
        rho = sys.spectral_radius()
        if rho >= 1.0:
            raise PreconditionError(f"A must be Schur (spectral radius {rho:.6g})")
        N = sys.N if N is None else int(N)
        tail = sys.tail_bound(N)
        witness.update({"spectral_radius": rho, "horizon": N, "tail_bound": tail})
        tolerances["tail"] = tail_tol
        if tail >= tail_tol:
            raise HorizonError(f"tail bound {tail:.3e} >= {tail_tol:g}; increase the horizon")
        g = impulse_response(sys, N)
        notes.append("truncated-horizon certificate; rigorous modulo the reported tail bound")
        if k == sys.n:
            notes.append(f"orders checked up to k = n = {sys.n}")
    elif isinstance(sys, ImpulseResponse):
        g = sys if N is None else ImpulseResponse(sys.samples[:int(N)], sys.source)
        witness["horizon"] = g.N
        notes.append("explicit finite impulse response; no tail information")
    else:
        raise TypeError("expected a HankelSystem or an ImpulseResponse")
    if k < 1:
        raise DimensionError("k must be positive")
    if g.N - 2 * k + 2 < 1:
        raise HorizonError(f"horizon {g.N} too short for order {k}")
    orders = {}
    passed = True
    margin = np.inf
    for j in range(1, k + 1):
        gj = hankel_compound_ir(g, j).samples
        lo = int(np.argmin(gj))
        orders[j] = {"min": float(gj[lo]), "argmin_j": lo + 1, "length": int(gj.size)}
        margin = min(margin, float(gj[lo]) + tol)
        if gj[lo] < -tol:
            passed = False
            orders[j]["violation"] = True
    witness["orders"] = orders
    return Verdict("hankel_k_positive", passed, margin=margin, witness=witness,
                   tolerances=tolerances, notes=notes)


def hankel_operator_apply(g: ImpulseResponse, u, j_max: int) -> np.ndarray:
    """y(j) = sum_{tau=1}^{T} g(j + tau) u(-tau) for j = 0..j_max, where
    ``u[tau-1]`` holds u(-tau)."""
    u = np.ravel(np.asarray(u, dtype=float))
    T = u.size
    if T == 0:
        raise DimensionError("u is empty")
    if j_max < 0:
        raise DimensionError("j_max must be nonnegative")
    if j_max + T > g.N:
        raise HorizonError(f"need g up to {j_max + T}, horizon is {g.N}")
    j = np.arange(j_max + 1)[:, None]
    tau = np.arange(1, T + 1)[None, :]
    return g.samples[j + tau - 1] @ u


def difference(seq, order: int = 1) -> np.ndarray:
    """Forward difference (Δs)(k) = s(k+1) - s(k), applied ``order`` times."""
    seq = np.ravel(np.asarray(seq, dtype=float))
    if order < 0:
        raise DimensionError("order must be nonnegative")
    if seq.size <= order:
        raise DimensionError("sequence too short for the requested order")
    return np.diff(seq, n=order)


def operator_svdp_batch(g: ImpulseResponse, U, j_max: int, rel_zero: float = 1e-12):
    """Variation-diminishing test of the Hankel operator over rows of U.

    Returns (s_minus_u, s_minus_y, ok) with ok requiring s-(y) <= s-(u) and
    matching first nonzero signs on equality. Output entries below
    rel_zero * max|y| are treated as zero.
    """
    U = np.atleast_2d(np.asarray(U, dtype=float))
    T = U.shape[1]
    if j_max + T > g.N:
        raise HorizonError(f"need g up to {j_max + T}, horizon is {g.N}")
    j = np.arange(j_max + 1)[:, None]
    tau = np.arange(1, T + 1)[None, :]
    H = g.samples[j + tau - 1]
    Y = U @ H.T
    scale = np.max(np.abs(Y), axis=1, keepdims=True)
    Y = np.where(np.abs(Y) <= rel_zero * scale, 0.0, Y)
    su = s_minus_batch(U)
    sy = s_minus_batch(Y)
    fu, _ = nonzero_end_signs(U)
    fy, _ = nonzero_end_signs(Y)
    ok = (sy <= su) & ((sy < su) | (fu == fy) | (fy == 0))
    return su, sy, ok
