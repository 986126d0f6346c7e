"""Sign variations, variation-diminishing checks and sign-regularity
classification."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .compound import as_matrix, det_batch, mult_compound
from .errors import DimensionError, PreconditionError, SingularMatrixError
from .index_sets import contiguous_sets, label
from .verdict import Verdict

MINOR_TOL = 1e-10


def signs(x, tol: float = 0.0) -> np.ndarray:
    """Entrywise sign with |x| <= tol treated as zero (int8)."""
    x = np.asarray(x, dtype=float)
    out = np.sign(x).astype(np.int8)
    if tol > 0:
        out[np.abs(x) <= tol] = 0
    return out


def _as_batch(X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        return X[None, :], True
    if X.ndim != 2:
        raise DimensionError("expected a vector or a 2-D batch of vectors")
    return X, False


def s_minus_batch(X, tol: float = 0.0) -> np.ndarray:
    """Sign changes after deleting zeros, for each row of X."""
    X, _ = _as_batch(X)
    sg = signs(X, tol)
    m, n = sg.shape
    nz = sg != 0
    pos = np.where(nz, np.arange(n), -1)
    last = np.maximum.accumulate(pos, axis=1)
    prev = np.empty_like(last)
    prev[:, 0] = -1
    prev[:, 1:] = last[:, :-1]
    prev_sign = np.take_along_axis(sg, np.maximum(prev, 0), axis=1)
    change = nz & (prev >= 0) & (sg != prev_sign)
    return change.sum(axis=1)


def _s_plus_dp(sg: np.ndarray) -> np.ndarray:
    """Best alternation counts ending in +1 / -1 for each row (m, 2)."""
    m, n = sg.shape
    neg_inf = -(n + 1)
    best = np.zeros((m, 2), dtype=np.int64)  # column 0: ends '+', column 1: ends '-'
    best[sg[:, 0] < 0, 0] = neg_inf
    best[sg[:, 0] > 0, 1] = neg_inf
    for j in range(1, n):
        plus = np.maximum(best[:, 0], best[:, 1] + 1)
        minus = np.maximum(best[:, 1], best[:, 0] + 1)
        plus[sg[:, j] < 0] = neg_inf
        minus[sg[:, j] > 0] = neg_inf
        best = np.stack([plus, minus], axis=1)
    return best


def s_plus_batch(X, tol: float = 0.0) -> np.ndarray:
    """Maximal sign changes over all +/-1 assignments to the zero entries,
    for each row of X (dynamic programming over entries)."""
    X, _ = _as_batch(X)
    return _s_plus_dp(signs(X, tol)).max(axis=1)


def s_minus(x, tol: float = 0.0) -> int:
    return int(s_minus_batch(np.ravel(x), tol)[0])


def s_plus(x, tol: float = 0.0) -> int:
    return int(s_plus_batch(np.ravel(x), tol)[0])


def end_signs_plus(X, tol: float = 0.0):
    """First and last signs of a maximizing assignment in s+.

    Leading and trailing zero runs must alternate away from the nearest
    nonzero entry, which fixes the end signs. All-zero rows get 0.
    """
    X, _ = _as_batch(X)
    sg = signs(X, tol).astype(np.int64)
    m, n = sg.shape
    nz = sg != 0
    has = nz.any(axis=1)
    first_idx = np.argmax(nz, axis=1)
    last_idx = n - 1 - np.argmax(nz[:, ::-1], axis=1)
    rows = np.arange(m)
    first = sg[rows, first_idx] * np.where(first_idx % 2, -1, 1)
    last = sg[rows, last_idx] * np.where((n - 1 - last_idx) % 2, -1, 1)
    return np.where(has, first, 0), np.where(has, last, 0)


def nonzero_end_signs(X, tol: float = 0.0):
    """Signs of the first and last nonzero entries (0 for a zero row)."""
    X, _ = _as_batch(X)
    sg = signs(X, tol).astype(np.int64)
    m, n = sg.shape
    nz = sg != 0
    has = nz.any(axis=1)
    rows = np.arange(m)
    first = sg[rows, np.argmax(nz, axis=1)]
    last = sg[rows, n - 1 - np.argmax(nz[:, ::-1], axis=1)]
    return np.where(has, first, 0), np.where(has, last, 0)


@dataclass
class SignStats:
    s_minus: int
    s_plus: int
    first_nonzero_sign: int
    last_nonzero_sign: int


def sign_stats(x, tol: float = 0.0) -> SignStats:
    x = np.ravel(np.asarray(x, dtype=float))
    first, last = nonzero_end_signs(x, tol)
    return SignStats(s_minus(x, tol), s_plus(x, tol), int(first[0]), int(last[0]))


def alternating_signs(n: int) -> np.ndarray:
    """Diagonal of D± = diag(1, -1, 1, ...)."""
    return np.where(np.arange(n) % 2, -1.0, 1.0)


def duality_check(x, tol: float = 0.0) -> Verdict:
    """s-(x) + s+(D± x) = n - 1."""
    x = np.ravel(np.asarray(x, dtype=float))
    n = x.size
    left = s_minus(x, tol)
    right = s_plus(alternating_signs(n) * x, tol)
    return Verdict("sign_duality", left + right == n - 1,
                   witness={"s_minus_x": left, "s_plus_Dx": right, "n_minus_1": n - 1},
                   tolerances={"zero": tol})


@dataclass
class SignRegularity:
    """Per-order sign classification of the minors of a matrix."""

    per_order: dict[int, str] = field(default_factory=dict)
    max_tp_order: int = 0
    max_tn_order: int = 0
    minor_range: dict[int, tuple[float, float]] = field(default_factory=dict)
    witness: dict[int, dict] = field(default_factory=dict)
    tol: float = MINOR_TOL

    def signature(self, k: int) -> int | None:
        lab = self.per_order[k]
        if lab == "NONE":
            return None
        return int(lab[lab.index("(") + 1:lab.index(")")])

    def is_ssr(self, k: int) -> bool:
        return self.per_order[k].startswith("SSR")

    def is_sr(self, k: int) -> bool:
        return self.per_order[k] != "NONE"

    def to_dict(self):
        return {"per_order": {str(k): v for k, v in self.per_order.items()},
                "max_TP_order": self.max_tp_order, "max_TN_order": self.max_tn_order,
                "minor_range": {str(k): list(v) for k, v in self.minor_range.items()},
                "witness": {str(k): v for k, v in self.witness.items()},
                "tol": self.tol}


def _order_label(C: np.ndarray, tol: float) -> str:
    if np.all(C > tol):
        return "SSR(+1)"
    if np.all(C < -tol):
        return "SSR(-1)"
    if np.all(np.abs(C) <= tol):
        return "SR(0)"
    if np.all(C >= -tol):
        return "SR(+1)"
    if np.all(C <= tol):
        return "SR(-1)"
    return "NONE"


def classify_sign_regularity(A, max_k: int | None = None, tol: float = MINOR_TOL) -> SignRegularity:
    """Scan all minors of orders 1..max_k."""
    M = as_matrix(A)
    lim = min(M.shape)
    max_k = lim if max_k is None else int(max_k)
    if not 1 <= max_k <= lim:
        raise DimensionError(f"max_k={max_k} outside 1..{lim}")
    out = SignRegularity(tol=tol)
    tp_open = tn_open = True
    for k in range(1, max_k + 1):
        C = mult_compound(M, k)
        lab = _order_label(C, tol)
        out.per_order[k] = lab
        out.minor_range[k] = (float(C.min()), float(C.max()))
        lo = np.unravel_index(np.argmin(C), C.shape)
        out.witness[k] = {"min_minor_position": (int(lo[0]), int(lo[1])),
                          "min_minor": float(C[lo])}
        if tp_open and lab == "SSR(+1)":
            out.max_tp_order = k
        else:
            tp_open = False
        if tn_open and bool(np.all(C >= -tol)):
            out.max_tn_order = k
        else:
            tn_open = False
    return out


def _contiguous_minors(M: np.ndarray, rows, cols) -> tuple[np.ndarray, list]:
    R = np.asarray(rows) - 1
    Cc = np.asarray(cols) - 1
    sub = M[R[:, None, :, None], Cc[None, :, None, :]]
    vals = det_batch(sub)
    pairs = [(r, c) for r in rows for c in cols]
    return vals.ravel(), pairs


def initial_minors(A, j: int):
    """Initial minors of order j: contiguous with row or column set (1..j)."""
    M = as_matrix(A)
    m, n = M.shape
    head = tuple(range(1, j + 1))
    pairs = [(head, b) for b in contiguous_sets(j, n)]
    pairs += [(a, head) for a in contiguous_sets(j, m) if a != head]
    R = np.asarray([p[0] for p in pairs]) - 1
    Cc = np.asarray([p[1] for p in pairs]) - 1
    vals = det_batch(M[R[:, :, None], Cc[:, None, :]])
    return vals, pairs


def contiguous_minors(A, k: int):
    M = as_matrix(A)
    m, n = M.shape
    return _contiguous_minors(M, contiguous_sets(k, m), contiguous_sets(k, n))


def tp_recognize_fast(A, k: int, tol: float = MINOR_TOL) -> Verdict:
    """TP_k test from initial minors of orders < k and contiguous k-minors."""
    M = as_matrix(A)
    lim = min(M.shape)
    if not 1 <= k <= lim:
        raise DimensionError(f"k={k} outside 1..{lim}")
    checked = 0
    worst = np.inf
    worst_at = None
    for j in range(1, k):
        vals, pairs = initial_minors(M, j)
        checked += len(vals)
        i = int(np.argmin(vals))
        if vals[i] < worst:
            worst, worst_at = float(vals[i]), (j, pairs[i])
    vals, pairs = contiguous_minors(M, k)
    checked += len(vals)
    i = int(np.argmin(vals))
    if vals[i] < worst:
        worst, worst_at = float(vals[i]), (k, pairs[i])
    witness = {"minors_checked": checked, "min_minor": worst,
               "contiguous_k_minors": vals}
    if worst_at is not None:
        witness["min_minor_at"] = {"order": worst_at[0], "rows": label(worst_at[1][0]),
                                   "cols": label(worst_at[1][1])}
    return Verdict("tp_fast", worst > tol, margin=worst - tol, witness=witness,
                   tolerances={"minor": tol})


def _nonsingular(M):
    if M.shape[0] != M.shape[1]:
        raise DimensionError("SR/SSR modes need a square matrix")
    s = np.linalg.svd(M, compute_uv=False)
    if s[-1] <= 1e-14 * max(1.0, s[0]):
        raise SingularMatrixError("matrix is singular")


def svdp_check(A, x, mode: str = "TP", k: int | None = None, tol: float = 0.0) -> Verdict:
    """Evaluate a variation-diminishing implication for one vector.

    SR: s-(x) <= k-1  implies  s-(Ax) <= k-1.
    SSR: s-(x) <= k-1  implies  s+(Ax) <= k-1.
    TP: s+(Ax) <= s-(x), with matching first/last signs on equality.
    """
    M = as_matrix(A)
    x = np.ravel(np.asarray(x, dtype=float))
    if x.size != M.shape[1]:
        raise DimensionError("x length must equal the number of columns")
    mode = mode.upper()
    y = M @ x
    sx_minus = s_minus(x, tol)
    witness = {"s_minus_x": sx_minus, "s_minus_Ax": s_minus(y, tol),
               "s_plus_Ax": s_plus(y, tol), "Ax": y}
    if mode in ("SR", "SSR"):
        if k is None:
            raise PreconditionError("SR/SSR modes need k")
        _nonsingular(M)
        if sx_minus > k - 1:
            return Verdict(f"svdp_{mode.lower()}", True, witness=witness,
                           notes=["premise s-(x) <= k-1 not met; implication vacuous"])
        count = witness["s_minus_Ax"] if mode == "SR" else witness["s_plus_Ax"]
        return Verdict(f"svdp_{mode.lower()}", count <= k - 1, margin=float(k - 1 - count),
                       witness=witness, tolerances={"zero": tol})
    if mode != "TP":
        raise ValueError(f"unknown mode {mode!r}")
    if not np.any(signs(x, tol)):
        raise PreconditionError("x must be nonzero")
    ok, oriented = svdp_tp_batch(M, x[None, :], tol)
    witness["orientation_ok"] = bool(oriented[0])
    return Verdict("svdp_tp", bool(ok[0]), margin=float(sx_minus - witness["s_plus_Ax"]),
                   witness=witness, tolerances={"zero": tol})


def svdp_tp_batch(A, X, tol: float = 0.0):
    """Vectorised TP-mode check over the rows of X.

    Returns (ok, oriented): ``ok`` requires s+(Ax) <= s-(x) and, on
    equality, agreement of first and last signs; ``oriented`` is the
    orientation test alone (True where equality does not occur).
    """
    M = as_matrix(A)
    X, _ = _as_batch(X)
    Y = X @ M.T
    sm = s_minus_batch(X, tol)
    sp = s_plus_batch(Y, tol)
    fx, lx = nonzero_end_signs(X, tol)
    fy, ly = end_signs_plus(Y, tol)
    eq = sp == sm
    oriented = ~eq | ((fx == fy) & (lx == ly))
    return (sp <= sm) & oriented, oriented
