"""Metzler and irreducibility tests, compound sign patterns, k-positivity,
Jacobi matrices and the cones of vectors with few sign variations."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .compound import add_compound, as_square
from .errors import DimensionError, PreconditionError
from .index_sets import enumerate_index_sets, label
from .measures import DEFAULT_LTV_TIMES
from .sign_tools import s_minus, s_plus
from .systems import LTI, SystemDef
from .verdict import Verdict

PATTERN_TOL = 1e-12

FREE = "*"
NONNEG = "+"
NONPOS = "-"
ZERO = "0"


def is_metzler(A, tol: float = PATTERN_TOL) -> Verdict:
    M = as_square(A)
    n = M.shape[0]
    off = M.real.copy()
    np.fill_diagonal(off, np.inf)
    lo = np.unravel_index(np.argmin(off), off.shape) if n > 1 else (0, 0)
    worst = float(off[lo]) if n > 1 else np.inf
    witness = {}
    if n > 1:
        witness = {"min_offdiagonal": worst, "position": (int(lo[0]) + 1, int(lo[1]) + 1)}
    return Verdict("metzler", n == 1 or worst >= -tol,
                   margin=None if n == 1 else worst + tol,
                   witness=witness, tolerances={"tol": tol})


def _reachable(adj: np.ndarray, start: int) -> np.ndarray:
    seen = np.zeros(len(adj), dtype=bool)
    seen[start] = True
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in np.flatnonzero(adj[v] & ~seen):
            seen[w] = True
            queue.append(w)
    return seen


def is_irreducible(A, tol: float = 0.0) -> Verdict:
    """Strong connectivity of the graph with an edge i -> j when a_ij != 0, i != j."""
    M = as_square(A)
    adj = np.abs(M) > tol
    np.fill_diagonal(adj, False)
    fwd = _reachable(adj, 0)
    bwd = _reachable(adj.T, 0)
    ok = bool(fwd.all() and bwd.all())
    witness = {}
    if not ok:
        witness["unreached_from_1"] = [int(i) + 1 for i in np.flatnonzero(~fwd)]
        witness["not_reaching_1"] = [int(i) + 1 for i in np.flatnonzero(~bwd)]
    return Verdict("irreducible", ok, witness=witness, tolerances={"tol": tol})


@dataclass
class SignPattern:
    """Entry constraints on A under which A^[k] is Metzler."""

    n: int
    k: int
    grid: tuple[tuple[str, ...], ...]
    case: str

    def violations(self, A, tol: float = PATTERN_TOL) -> list[tuple[int, int, float]]:
        M = as_square(A)
        if M.shape[0] != self.n:
            raise DimensionError(f"pattern is for n={self.n}")
        bad = []
        for i in range(self.n):
            for j in range(self.n):
                c = self.grid[i][j]
                v = float(M[i, j])
                if (c == NONNEG and v < -tol) or (c == NONPOS and v > tol) \
                        or (c == ZERO and abs(v) > tol):
                    bad.append((i + 1, j + 1, v))
        return bad

    def matches(self, A, tol: float = PATTERN_TOL) -> bool:
        return not self.violations(A, tol)

    def render(self) -> str:
        return "\n".join(" ".join(row) for row in self.grid)


def metzler_compound_pattern(n: int, k: int) -> SignPattern:
    """Sign constraints on the entries of an n x n matrix A that are
    equivalent to A^[k] being Metzler (n >= 3)."""
    n, k = int(n), int(k)
    if n < 3:
        raise DimensionError("sign patterns are defined for n >= 3")
    if not 1 <= k <= n:
        raise DimensionError(f"k={k} outside 1..{n}")
    grid = [[FREE] * n for _ in range(n)]
    if k == n:
        case = "trace"  # 1 x 1 compound, always Metzler
    elif k == 1:
        case = "metzler"
        for i in range(n):
            for j in range(n):
                if i != j:
                    grid[i][j] = NONNEG
    elif k == n - 1:
        case = "n-1"
        for i in range(n):
            for j in range(n):
                if i != j:
                    grid[i][j] = NONNEG if (i - j) % 2 else NONPOS
    else:
        case = "odd" if k % 2 else "even"
        corner = NONNEG if k % 2 else NONPOS
        for i in range(n):
            for j in range(n):
                d = abs(i - j)
                if d == 1:
                    grid[i][j] = NONNEG
                elif 1 < d < n - 1:
                    grid[i][j] = ZERO
        grid[0][n - 1] = corner
        grid[n - 1][0] = corner
    return SignPattern(n, k, tuple(tuple(r) for r in grid), case)


def _offending_entry(B: np.ndarray, k: int, n: int, tol: float):
    off = B.real.copy()
    np.fill_diagonal(off, np.inf)
    r, c = np.unravel_index(np.argmin(off), off.shape)
    if off[r, c] >= -tol:
        return None
    sets = enumerate_index_sets(k, n)
    return {"row": label(sets[r]), "col": label(sets[c]), "value": float(off[r, c])}


def k_positive_verdict(sys: SystemDef, k: int, strong: bool = False, times=None,
                       exception_fraction: float = 0.0, tol: float = PATTERN_TOL) -> Verdict:
    """PASS iff A^[k](t) is Metzler at every sample; strong mode also needs
    irreducibility except on at most ``exception_fraction`` of the samples."""
    if not sys.linear:
        raise PreconditionError("k-positivity verdicts need an LTI or LTV system")
    if not 1 <= k <= sys.n:
        raise DimensionError(f"k={k} outside 1..{sys.n}")
    notes = []
    if sys.tag == LTI:
        times = [0.0]
    else:
        if times is None:
            times = sys.times if sys.times is not None else DEFAULT_LTV_TIMES
        notes.append("sampled check over the time grid")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times.size == 0:
        raise PreconditionError("empty time sampling")
    first_fail = None
    reducible = []
    for t in times:
        B = add_compound(sys.matrix(float(t)), k)
        bad = _offending_entry(B, k, sys.n, tol)
        if bad is not None and first_fail is None:
            first_fail = {"time": float(t), **bad}
        if strong and not is_irreducible(B).passed:
            reducible.append(float(t))
    passed = first_fail is None
    witness = {"k": k, "samples": int(times.size)}
    if first_fail is not None:
        witness["offending_entry"] = first_fail
    if strong:
        allowed = int(np.floor(exception_fraction * times.size))
        witness["reducible_samples"] = reducible
        witness["allowed_exceptions"] = allowed
        passed = passed and len(reducible) <= allowed
        if sys.tag != LTI:
            notes.append("isolated-exception semantics approximated by an allowed sample fraction")
    return Verdict("strong_k_positive" if strong else "k_positive", passed,
                   witness=witness, tolerances={"tol": tol}, notes=notes)


def is_jacobi(A, tol: float = PATTERN_TOL) -> Verdict:
    """Tridiagonal with strictly positive super- and sub-diagonals."""
    M = as_square(A)
    n = M.shape[0]
    i, j = np.indices(M.shape)
    outside = np.abs(M[np.abs(i - j) > 1])
    band_ok = bool(np.all(outside <= tol)) if outside.size else True
    sup = np.diagonal(M, 1)
    sub = np.diagonal(M, -1)
    nb = np.concatenate([sup, sub]).real
    pos_ok = bool(np.all(nb > 0)) if nb.size else True
    return Verdict("jacobi", band_ok and pos_ok,
                   margin=float(nb.min()) if nb.size else None,
                   witness={"tridiagonal": band_ok, "min_offdiagonal_neighbour":
                            float(nb.min()) if nb.size else None},
                   tolerances={"tol": tol})


def cone_membership(x, k: int, tol: float = 0.0) -> Verdict:
    """Membership in P^k_- (s- <= k-1) and P^k_+ (s+ <= k-1); the verdict
    passes on P^k_- membership."""
    x = np.ravel(np.asarray(x, dtype=float))
    if k < 1:
        raise DimensionError("k must be positive")
    sm = s_minus(x, tol)
    sp = s_plus(x, tol)
    return Verdict("cone_membership", sm <= k - 1,
                   witness={"k": k, "s_minus": sm, "s_plus": sp,
                            "in_P_minus": sm <= k - 1, "in_P_plus": sp <= k - 1},
                   tolerances={"zero": tol})
