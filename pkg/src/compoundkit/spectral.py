"""Eigenvalues, Kronecker algebra, fractional powers and alpha-compounds."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .compound import add_compound, as_square, mult_compound
from .errors import (
    BranchCutError,
    DefectiveMatrixError,
    DimensionError,
    EigenConvergenceError,
    PreconditionError,
    SingularMatrixError,
)
from .index_sets import MAX_N
from .verdict import Verdict

MATCH_TOL = 1e-5
COND_LIMIT = 1e8
RESIDUAL_TOL = 1e-6


@dataclass
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None
    symmetric: bool = False

    def __len__(self):
        return len(self.eigenvalues)


def _is_hermitian(M: np.ndarray) -> bool:
    scale = max(1.0, float(np.max(np.abs(M))))
    return bool(np.allclose(M, M.conj().T, rtol=0.0, atol=1e-14 * scale))


def eig(A, vectors: bool = False) -> Spectrum:
    """All eigenvalues of a square matrix.

    Real symmetric (Hermitian) input gives real eigenvalues sorted
    descending. With ``vectors=True`` the residual of every pair is checked.
    """
    M = as_square(A)
    n = M.shape[0]
    if n > MAX_N:
        raise DimensionError(f"n={n} exceeds {MAX_N}")
    return _eig(M, vectors)


def _eig(M: np.ndarray, vectors: bool = False) -> Spectrum:
    # no size cap: compound matrices routinely exceed the base-matrix limit
    sym = _is_hermitian(M)
    try:
        if sym:
            if vectors:
                w, V = np.linalg.eigh(M)
            else:
                w, V = np.linalg.eigvalsh(M), None
            order = np.argsort(w)[::-1]
            w = w[order]
            V = None if V is None else V[:, order]
        elif vectors:
            w, V = np.linalg.eig(M)
        else:
            w, V = np.linalg.eigvals(M), None
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(f"eigenvalue iteration failed: {exc}") from exc
    if V is not None:
        norm = max(1.0, np.linalg.norm(M, 2))
        res = np.linalg.norm(M @ V - V * w, axis=0)
        if np.any(res > RESIDUAL_TOL * norm):
            raise EigenConvergenceError(
                f"eigenpair residual {res.max():.3e} exceeds tolerance")
    return Spectrum(np.asarray(w), V, sym)


def _greedy_match(a: np.ndarray, b: np.ndarray) -> float:
    a = sorted(a, key=lambda z: (z.real, z.imag))
    pool = list(b)
    worst = 0.0
    for z in a:
        d = [abs(z - w) for w in pool]
        j = int(np.argmin(d))
        worst = max(worst, d[j])
        pool.pop(j)
    return worst


def match_multisets(a, b) -> float:
    """Worst-case distance of a one-to-one matching between two multisets
    of complex numbers.

    Greedy nearest-neighbour matching after sorting by (real, imag) is tried
    first; an optimal assignment is used as well and the smaller worst case
    reported, so close clusters cannot produce spurious mismatches.
    """
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.shape != b.shape:
        raise DimensionError(f"multisets have sizes {a.size} and {b.size}")
    if a.size == 0:
        return 0.0
    greedy = _greedy_match(a, b)
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    optimal = float(cost[r, c].max())
    return min(greedy, optimal)


def _match_tol(values, tol: float) -> float:
    values = np.asarray(values)
    return tol * max(1.0, float(np.max(np.abs(values))) if values.size else 1.0)


def check_compound_spectrum(A, k: int, tol: float = MATCH_TOL) -> Verdict:
    """Compare eig(A^(k)) with k-fold products and eig(A^[k]) with k-fold
    sums of eig(A)."""
    M = as_square(A)
    n = M.shape[0]
    lam = eig(M).eigenvalues
    combos = list(combinations(range(n), k))
    prods = np.array([np.prod(lam[list(c)]) for c in combos])
    sums = np.array([np.sum(lam[list(c)]) for c in combos])
    ev_mult = _eig(mult_compound(M, k)).eigenvalues
    ev_add = _eig(add_compound(M, k)).eigenvalues
    err_mult = match_multisets(ev_mult, prods)
    err_add = match_multisets(ev_add, sums)
    tol_mult = _match_tol(prods, tol)
    tol_add = _match_tol(sums, tol)
    passed = err_mult <= tol_mult and err_add <= tol_add
    return Verdict(
        "compound_spectrum",
        passed,
        margin=min(tol_mult - err_mult, tol_add - err_add),
        witness={"k": k, "worst_mult_mismatch": err_mult,
                 "worst_add_mismatch": err_add,
                 "eig_A": lam, "products": prods, "sums": sums},
        tolerances={"match": tol},
    )


def kron(A, B) -> np.ndarray:
    return np.kron(np.asarray(A), np.asarray(B))


def kron_sum(X, Y) -> np.ndarray:
    """X ⊕ Y = X ⊗ I_m + I_n ⊗ Y."""
    X = as_square(X, "X")
    Y = as_square(Y, "Y")
    n, m = X.shape[0], Y.shape[0]
    return np.kron(X, np.eye(m)) + np.kron(np.eye(n), Y)


def frac_power(A, s: float) -> np.ndarray:
    """Principal-branch power V diag(λ^s) V^{-1}, λ^s = exp(s Log λ)."""
    M = as_square(A)
    s = float(s)
    integer = s == round(s)
    if _is_hermitian(M):
        w, V = np.linalg.eigh(M)
        scale = max(1.0, float(np.max(np.abs(w))))
        if np.min(np.abs(w)) <= 1e-14 * scale:
            raise SingularMatrixError("matrix is singular")
        if np.all(w > 0) or integer:
            p = w.astype(complex) ** s if not integer else w ** int(round(s))
            out = (V * p) @ V.conj().T
            out = 0.5 * (out + out.conj().T)
            if np.all(w > 0) and not np.iscomplexobj(M):
                return out.real
            return out
        raise BranchCutError("eigenvalue on the closed negative real axis")
    w, V = np.linalg.eig(M)
    scale = max(1.0, float(np.max(np.abs(w))))
    if np.min(np.abs(w)) <= 1e-14 * scale:
        raise SingularMatrixError("matrix is singular")
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise DefectiveMatrixError(f"eigenvector condition number {cond:.3e} > {COND_LIMIT:g}")
    if not integer:
        on_cut = (w.real < 0) & (np.abs(w.imag) <= 1e-12 * scale)
        if np.any(on_cut):
            raise BranchCutError("eigenvalue on the closed negative real axis")
        p = np.exp(s * np.log(w.astype(complex)))
    else:
        p = w.astype(complex) ** int(round(s))
    return (V * p) @ np.linalg.inv(V)


def split_alpha(alpha: float, n: int) -> tuple[int, float]:
    """Write alpha = k + s with integer k in 1..n-1 and s in (0, 1)."""
    alpha = float(alpha)
    if not 1.0 < alpha < n:
        raise DimensionError(f"alpha={alpha} outside (1, {n})")
    k = math.floor(alpha)
    s = alpha - k
    if s == 0.0:
        raise PreconditionError(f"alpha={alpha} is an integer; use the integer compound")
    return k, s


def alpha_mult_compound(A, alpha: float) -> np.ndarray:
    """(A^(k))^(1-s) ⊗ (A^(k+1))^s for alpha = k + s."""
    M = as_square(A)
    n = M.shape[0]
    k, s = split_alpha(alpha, n)
    if abs(np.linalg.det(M)) <= 1e-14 * max(1.0, np.linalg.norm(M, 2)) ** n:
        raise SingularMatrixError("alpha-multiplicative compound needs nonsingular A")
    P = frac_power(mult_compound(M, k), 1.0 - s)
    Q = frac_power(mult_compound(M, k + 1), s)
    return np.kron(P, Q)


def alpha_add_compound(A, alpha: float) -> np.ndarray:
    """((1-s) A^[k]) ⊕ (s A^[k+1]) for alpha = k + s."""
    M = as_square(A)
    n = M.shape[0]
    k, s = split_alpha(alpha, n)
    return kron_sum((1.0 - s) * add_compound(M, k), s * add_compound(M, k + 1))


def is_hurwitz(A, tol: float = 1e-10) -> Verdict:
    lam = _eig(as_square(A)).eigenvalues
    top = float(np.max(lam.real))
    return Verdict("hurwitz", top < -tol, margin=-top,
                   witness={"max_real_part": top, "eigenvalues": lam},
                   tolerances={"tol": tol})


def is_schur(A, tol: float = 1e-10) -> Verdict:
    lam = _eig(as_square(A)).eigenvalues
    rho = float(np.max(np.abs(lam)))
    return Verdict("schur", rho < 1.0 - tol, margin=1.0 - rho,
                   witness={"spectral_radius": rho, "eigenvalues": lam},
                   tolerances={"tol": tol})
