"""Matrix measures, their closed forms on additive compounds, and
k-/alpha-contraction verdicts."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .compound import add_compound, as_square
from .errors import DimensionError, PreconditionError
from .index_sets import check_order, enumerate_index_sets
from .spectral import _eig, alpha_add_compound, split_alpha
from .systems import LTI, LTV, NONLINEAR, SystemDef
from .verdict import Verdict

NORMS = ("L1", "L2", "Linf")
STRICT_TOL = 1e-12
DEFAULT_POINTS = 9
DEFAULT_LTV_TIMES = np.linspace(0.0, 10.0, 101)


def norm_tag(tag: str) -> str:
    t = str(tag).strip().lower().replace("_", "")
    aliases = {"l1": "L1", "1": "L1", "l2": "L2", "2": "L2",
               "linf": "Linf", "inf": "Linf", "l∞": "Linf", "infinity": "Linf"}
    if t not in aliases:
        raise ValueError(f"unknown norm {tag!r}; use one of {NORMS}")
    return aliases[t]


@dataclass
class MeasureResult:
    norm_tag: str
    value: float
    k_or_alpha: float
    witness: object

    def to_dict(self):
        return {"norm": self.norm_tag, "value": self.value,
                "k_or_alpha": self.k_or_alpha, "witness": self.witness}


def _hermitian_part(M):
    return 0.5 * (M + M.conj().T)


def mu(A, tag: str = "L2") -> float:
    """Matrix measure induced by the L1, L2 or Linf vector norm."""
    M = as_square(A)
    tag = norm_tag(tag)
    if tag == "L2":
        return float(_eig(_hermitian_part(M)).eigenvalues[0].real)
    absM = np.abs(M)
    d = np.diagonal(M).real
    off = absM - np.diag(np.diagonal(absM))
    sums = off.sum(axis=0) if tag == "L1" else off.sum(axis=1)
    return float(np.max(d + sums))


def mu_compound(A, k: int, tag: str = "L2") -> MeasureResult:
    """mu(A^[k]) from closed forms, without forming the compound.

    L1: max over alpha in Q(k, n) of the sum of a_{ii}, i in alpha, plus
    |a_{ji}| for i in alpha, j outside alpha. Linf is the row analogue.
    L2: sum of the k largest eigenvalues of the Hermitian part of A.
    """
    M = as_square(A)
    n = M.shape[0]
    tag = norm_tag(tag)
    if not 1 <= k <= n:
        raise DimensionError(f"k={k} outside 1..{n}")
    if tag == "L2":
        w = _eig(_hermitian_part(M)).eigenvalues.real
        return MeasureResult(tag, float(np.sum(w[:k])), k,
                             {"eigen_indices": list(range(1, k + 1))})
    check_order(k, n)
    absM = np.abs(M)
    d = np.diagonal(M).real
    off = absM - np.diag(np.diagonal(absM))
    line = off.sum(axis=0) if tag == "L1" else off.sum(axis=1)
    idx = np.asarray(enumerate_index_sets(k, n)) - 1
    inner = off[idx[:, :, None], idx[:, None, :]].sum(axis=(1, 2))
    vals = (d[idx] + line[idx]).sum(axis=1) - inner
    best = int(np.argmax(vals))
    return MeasureResult(tag, float(vals[best]), k,
                         {"index_set": tuple(int(v) + 1 for v in idx[best])})


def _box_grid(box, points: int) -> np.ndarray:
    axes = [np.linspace(lo, hi, points) for lo, hi in np.asarray(box, dtype=float)]
    return np.array(list(itertools.product(*axes)))


def _samples(sys: SystemDef, grid, times):
    """(t, x) pairs at which the Jacobian is evaluated."""
    notes = []
    if sys.tag == LTI:
        return [(0.0, None)], notes
    if sys.tag == LTV:
        if grid is not None and times is None:
            times = grid
        if times is None:
            window = sys.time_window()
            times = sys.times if window is not None else DEFAULT_LTV_TIMES
        times = np.atleast_1d(np.asarray(times, dtype=float))
        if times.size == 0:
            raise PreconditionError("empty time grid")
        notes.append("sampled sufficient-condition check over the time grid")
        return [(float(t), None) for t in times], notes
    times = [0.0] if times is None else list(np.atleast_1d(times))
    if grid is None or np.isscalar(grid):
        if sys.box is None:
            raise PreconditionError("nonlinear system without a state box needs explicit grid points")
        points = DEFAULT_POINTS if grid is None else int(grid)
        if points < 1:
            raise PreconditionError("grid needs at least one point per axis")
        pts = _box_grid(sys.box, points)
    else:
        pts = np.atleast_2d(np.asarray(grid, dtype=float))
        if pts.shape[1] != sys.n:
            raise DimensionError(f"grid points must have {sys.n} coordinates")
    if len(pts) == 0 or len(times) == 0:
        raise PreconditionError("empty sample grid")
    notes.append("sampled sufficient-condition check over a state grid, not a proof")
    return [(float(t), x) for t in times for x in pts], notes


def _verdict(name, values, samples, eta, tag, order, notes, extra=None):
    values = np.asarray(values)
    worst = int(np.argmax(values))
    t, x = samples[worst]
    witness = {"norm": tag, "order": order, "worst_value": float(values[worst]),
               "worst_time": t, "samples": len(values)}
    if x is not None:
        witness["worst_state"] = np.asarray(x)
    if extra:
        witness.update(extra)
    passed = bool(values[worst] <= -eta + STRICT_TOL)
    return Verdict(name, passed, margin=float(-eta - values[worst]), witness=witness,
                   tolerances={"eta": eta, "strict": STRICT_TOL}, notes=notes)


def _check_eta(eta):
    eta = float(eta)
    if not eta > 0:
        raise PreconditionError("eta must be positive")
    return eta


def k_contraction_verdict(sys: SystemDef, k: int, tag: str = "L2", eta: float = 1e-3,
                          grid=None, times=None) -> Verdict:
    """PASS iff mu(J^[k]) <= -eta at every sample."""
    tag = norm_tag(tag)
    eta = _check_eta(eta)
    if not 1 <= k <= sys.n:
        raise DimensionError(f"k={k} outside 1..{sys.n}")
    samples, notes = _samples(sys, grid, times)
    values = [mu_compound(sys.jacobian(t, x), k, tag).value for t, x in samples]
    return _verdict("k_contraction", values, samples, eta, tag, k, notes)


def thomas_alpha_bound(b: float, s: float, c: float = 0.0) -> float:
    """Supremum over the invariant box of mu1 of the (2+s)-additive compound
    of the Thomas Jacobian with feedback gain c."""
    return 1.0 - 2.0 * b - s * (b + 1.0) + max(2.0 * c, (1.0 + s) * c)


def alpha_contraction_verdict(sys: SystemDef, alpha: float, tag: str = "L2",
                              eta: float = 1e-3, grid=None, times=None) -> Verdict:
    tag = norm_tag(tag)
    eta = _check_eta(eta)
    k, s = split_alpha(alpha, sys.n)
    samples, notes = _samples(sys, grid, times)
    values = [mu(alpha_add_compound(sys.jacobian(t, x), alpha), tag) for t, x in samples]
    extra = {"k": k, "s": s}
    if sys.name == "thomas" and tag == "L1" and k == 2:
        b, c = sys.params["b"], sys.params["c"]
        extra["analytic_bound"] = thomas_alpha_bound(b, s, c)
        notes.append("analytic L1 bound over the invariant box reported alongside samples")
    return _verdict("alpha_contraction", values, samples, eta, tag, float(alpha), notes, extra)


def lti_k_subspace_check(A, k: int, tol: float = 1e-10) -> Verdict:
    """Every k-fold eigenvalue sum must have negative real part."""
    M = as_square(A)
    n = M.shape[0]
    if not 1 <= k <= n:
        raise DimensionError(f"k={k} outside 1..{n}")
    lam = _eig(as_square(M)).eigenvalues
    re = np.sort(lam.real)[::-1]
    # the largest real part of a k-sum uses the k largest real parts
    top = float(re[:k].sum())
    passed = top < -tol
    stable = int(np.sum(re < 0))
    notes = []
    if passed:
        notes.append(f"at least {n - k + 1} eigenvalues have negative real part")
        assert stable >= n - k + 1
    return Verdict("lti_k_subspace", passed, margin=-top,
                   witness={"real_parts_desc": re, "max_k_sum": top,
                            "stable_eigenvalues": stable},
                   tolerances={"tol": tol}, notes=notes)


def k_sums(values, k: int) -> np.ndarray:
    values = np.asarray(values)
    return np.array([values[list(c)].sum() for c in combinations(range(len(values)), k)])
