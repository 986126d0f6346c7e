"""Multiplicative and additive compound matrices."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError, PreconditionError
from .index_sets import (
    IndexSet,
    check_order,
    enumerate_index_sets,
    rank_table,
    validate,
)

# float comparisons: absolute 1e-9 or relative 1e-7, whichever is looser
ABS_TOL = 1e-9
REL_TOL = 1e-7

_CHUNK_ELEMENTS = 4_000_000


def as_matrix(A, name: str = "A") -> np.ndarray:
    """Coerce to a finite 2-D float (or complex) array."""
    M = np.asarray(A)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {M.shape}")
    if M.size == 0:
        raise DimensionError(f"{name} is empty")
    if not np.iscomplexobj(M):
        M = M.astype(float, copy=False)
    if not np.all(np.isfinite(M)):
        raise DimensionError(f"{name} has non-finite entries")
    return M


def as_square(A, name: str = "A") -> np.ndarray:
    M = as_matrix(A, name)
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    return M


def close(a, b, abs_tol: float = ABS_TOL, rel_tol: float = REL_TOL) -> bool:
    """Entrywise dual-tolerance comparison."""
    a = np.asarray(a)
    b = np.asarray(b)
    scale = np.maximum(np.abs(a), np.abs(b))
    return bool(np.all(np.abs(a - b) <= np.maximum(abs_tol, rel_tol * scale)))


def _det_raw(S: np.ndarray) -> np.ndarray:
    k = S.shape[-1]
    if k == 3:
        a, b, c = S[..., 0, 0], S[..., 0, 1], S[..., 0, 2]
        d, e, f = S[..., 1, 0], S[..., 1, 1], S[..., 1, 2]
        g, h, i = S[..., 2, 0], S[..., 2, 1], S[..., 2, 2]
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    return np.linalg.det(S)


def det_batch(S: np.ndarray) -> np.ndarray:
    """Determinants over the last two axes.

    Orders 1-3 use cofactor expansion; larger blocks go through LU with
    partial pivoting. From order 3 on, the block and its transpose are
    averaged so that (A^T)^(k) = (A^(k))^T holds bit for bit.
    """
    k = S.shape[-1]
    if k == 1:
        return S[..., 0, 0].copy()
    if k == 2:
        return S[..., 0, 0] * S[..., 1, 1] - S[..., 0, 1] * S[..., 1, 0]
    return 0.5 * (_det_raw(S) + _det_raw(np.swapaxes(S, -1, -2)))


def minor(A, alpha, beta) -> float:
    """det of the submatrix A[alpha | beta] (1-based index sets)."""
    M = as_matrix(A)
    n, m = M.shape
    alpha = validate(alpha, n)
    beta = validate(beta, m)
    if len(alpha) != len(beta):
        raise DimensionError("row and column index sets differ in size")
    rows = np.asarray(alpha) - 1
    cols = np.asarray(beta) - 1
    return det_batch(M[np.ix_(rows, cols)][None])[0]


def mult_compound(A, k: int) -> np.ndarray:
    """The k-multiplicative compound: all k-minors, rows/columns in
    lexicographic order of Q(k, n) and Q(k, m)."""
    M = as_matrix(A)
    n, m = M.shape
    if not 1 <= k <= min(n, m):
        raise DimensionError(f"k={k} outside 1..min({n},{m})")
    r = check_order(k, n)
    c = check_order(k, m)
    rows = np.asarray(enumerate_index_sets(k, n)) - 1
    cols = np.asarray(enumerate_index_sets(k, m)) - 1
    out = np.empty((r, c), dtype=M.dtype)
    step = max(1, _CHUNK_ELEMENTS // max(1, c * k * k))
    for start in range(0, r, step):
        block = rows[start:start + step]
        sub = M[block[:, None, :, None], cols[None, :, None, :]]
        out[start:start + step] = det_batch(sub)
    return out


@lru_cache(maxsize=128)
def add_compound_structure(k: int, n: int):
    """Index tables for the explicit additive-compound formula.

    Returns (diag_sets, rows, cols, src_i, src_j, sign): the diagonal entry
    of row a is the sum of a_ii over diag_sets[a]; each off-diagonal entry
    (rows, cols) equals sign * a[src_i, src_j]. Indices are 0-based.
    """
    check_order(k, n)
    sets = enumerate_index_sets(k, n)
    ranks = rank_table(k, n)
    rows, cols, src_i, src_j, sign = [], [], [], [], []
    for a, alpha in enumerate(sets):
        members = set(alpha)
        outside = [j for j in range(1, n + 1) if j not in members]
        for l, i in enumerate(alpha, start=1):
            rest = alpha[:l - 1] + alpha[l:]
            for j in outside:
                beta = tuple(sorted(rest + (j,)))
                m_pos = beta.index(j) + 1
                rows.append(a)
                cols.append(ranks[beta])
                src_i.append(i - 1)
                src_j.append(j - 1)
                sign.append(-1.0 if (l + m_pos) % 2 else 1.0)
    diag_sets = np.asarray(sets, dtype=np.intp) - 1
    tables = (diag_sets, np.asarray(rows, dtype=np.intp), np.asarray(cols, dtype=np.intp),
              np.asarray(src_i, dtype=np.intp), np.asarray(src_j, dtype=np.intp),
              np.asarray(sign))
    for t in tables:
        t.setflags(write=False)
    return tables


def add_compound(A, k: int) -> np.ndarray:
    """The k-additive compound from its explicit entry formula.

    Diagonal entries are sums of the selected diagonal entries of A; an
    entry whose row and column index sets differ in exactly one position
    (i_l in the row set, j_m in the column set) equals (-1)^(l+m) a_{i_l j_m};
    everything else is zero.
    """
    M = as_square(A)
    n = M.shape[0]
    if not 1 <= k <= n:
        raise DimensionError(f"k={k} outside 1..{n}")
    diag_sets, rows, cols, src_i, src_j, sign = add_compound_structure(k, n)
    r = len(diag_sets)
    out = np.zeros((r, r), dtype=M.dtype)
    out[np.arange(r), np.arange(r)] = np.diagonal(M)[diag_sets].sum(axis=1)
    out[rows, cols] = sign * M[src_i, src_j]
    return out


def add_compound_via_derivative(A, k: int, eps: float = 1e-6) -> np.ndarray:
    """Forward-difference approximation ((I + eps A)^(k) - I) / eps."""
    M = as_square(A)
    if not 0 < eps <= 1e-3:
        raise PreconditionError(f"eps must lie in (0, 1e-3], got {eps}")
    n = M.shape[0]
    P = mult_compound(np.eye(n) + eps * M, k)
    return (P - np.eye(P.shape[0])) / eps


def gram_det(X, Y) -> float:
    """(Y^(k))^T X^(k) for n x k matrices X, Y; equals det(Y^T X)."""
    X = as_matrix(X, "X")
    Y = as_matrix(Y, "Y")
    if X.shape != Y.shape:
        raise DimensionError(f"shape mismatch {X.shape} vs {Y.shape}")
    n, k = X.shape
    if k > n:
        raise DimensionError(f"need k <= n, got shape {X.shape}")
    return (mult_compound(Y, k)[:, 0] @ mult_compound(X, k)[:, 0]).item()


def det_product_rectangular(A, B) -> float:
    """det(AB) for A (n x m) and B (m x n) by the minor-sum expansion over Q(n, m)."""
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    n, m = A.shape
    if B.shape != (m, n):
        raise DimensionError(f"B must have shape {(m, n)}, got {B.shape}")
    if n > m:
        return 0.0
    # row n-compound of A (1 x C(m,n)) against column n-compound of B
    return (mult_compound(A, n)[0] @ mult_compound(B, n)[:, 0]).item()


@dataclass
class CompoundMatrix:
    """A compound matrix together with the index sets labelling it."""

    kind: str
    k: int
    base_shape: tuple[int, int]
    entries: np.ndarray
    row_index: tuple[IndexSet, ...]
    col_index: tuple[IndexSet, ...]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def entry(self, alpha, beta):
        n, m = self.base_shape
        return self.entries[rank_table(self.k, n)[tuple(alpha)],
                            rank_table(self.k, m)[tuple(beta)]]


def compound_matrix(A, k: int, kind: str = "multiplicative") -> CompoundMatrix:
    M = as_matrix(A)
    n, m = M.shape
    if kind in ("multiplicative", "mult"):
        entries = mult_compound(M, k)
        kind = "multiplicative"
    elif kind in ("additive", "add"):
        entries = add_compound(M, k)
        kind = "additive"
    else:
        raise ValueError(f"unknown compound kind {kind!r}")
    return CompoundMatrix(kind, k, (n, m), entries,
                          enumerate_index_sets(k, n), enumerate_index_sets(k, m))
