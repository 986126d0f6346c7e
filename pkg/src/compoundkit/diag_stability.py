"""Discrete-time diagonal and k-diagonal stability."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .compound import as_square, mult_compound
from .errors import CertificateError, DimensionError, PreconditionError, SingularMatrixError
from .index_sets import check_order
from .sign_tools import classify_sign_regularity
from .spectral import is_schur
from .verdict import Verdict

PD_TOL = 1e-10


@dataclass
class DiagonalCertificate:
    k: int
    d: np.ndarray
    margin: float

    def to_dict(self):
        return {"k": self.k, "d": self.d.tolist(), "margin": self.margin}


def verify_k_diag_stability(A, k: int, d, tol: float = PD_TOL) -> Verdict:
    """PASS iff (A^(k))^T diag(d) A^(k) - diag(d) is negative definite."""
    M = as_square(A)
    n = M.shape[0]
    r = check_order(k, n)
    d = np.ravel(np.asarray(d, dtype=float))
    if d.size != r:
        raise DimensionError(f"d must have length C({n},{k}) = {r}")
    if not np.all(d > 0):
        raise PreconditionError("d must be strictly positive")
    C = mult_compound(M, k)
    S = C.T @ (d[:, None] * C) - np.diag(d)
    S = 0.5 * (S + S.T)
    top = float(np.linalg.eigvalsh(S)[-1])
    return Verdict("k_diagonal_stability", top < -tol, margin=-top,
                   witness={"k": k, "lambda_max": top},
                   tolerances={"pd": tol})


def _check_nonneg_schur(A):
    M = as_square(A)
    if np.any(M < 0):
        raise PreconditionError("matrix must be entrywise nonnegative")
    if not is_schur(M).passed:
        raise PreconditionError("matrix must be Schur")
    return M


def _recipe(M, x, y):
    n = M.shape[0]
    x = np.ones(n) if x is None else np.ravel(np.asarray(x, dtype=float))
    y = np.ones(n) if y is None else np.ravel(np.asarray(y, dtype=float))
    if x.size != n or y.size != n:
        raise DimensionError("x and y must have length n")
    if not (np.all(x > 0) and np.all(y > 0)):
        raise PreconditionError("x and y must be strictly positive")
    I = np.eye(n)
    try:
        xi = np.linalg.solve(I - M, x)
        z = np.linalg.solve(I - M.T, y)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError("I - A is singular") from exc
    return xi, z


def construct_dlf_nonneg(A, x=None, y=None) -> DiagonalCertificate:
    """Diagonal Lyapunov certificate for a nonnegative Schur matrix:
    xi = (I-A)^{-1} x, z = (I-A^T)^{-1} y, d = z / xi."""
    M = _check_nonneg_schur(A)
    xi, z = _recipe(M, x, y)
    d = z / xi
    v = verify_k_diag_stability(M, 1, d)
    if not v.passed:
        raise CertificateError(f"constructed certificate fails (margin {v.margin:.3e})")
    return DiagonalCertificate(1, d, v.margin)


def nonneg_schur_conditions(A, x=None, y=None, tol: float = 0.0) -> Verdict:
    """Evaluate the five equivalent conditions for a nonnegative matrix,
    using the constructive recipe for the existential ones."""
    M = as_square(A)
    if np.any(M < 0):
        raise PreconditionError("matrix must be entrywise nonnegative")
    n = M.shape[0]
    c1 = is_schur(M).passed
    out = {"schur": c1}
    try:
        xi, z = _recipe(M, x, y)
        c2 = bool(np.all(xi > tol) and np.all(M @ xi < xi - tol))
        c3 = bool(np.all(z > tol) and np.all(M.T @ z < z - tol))
        c4 = False
        if np.all(xi > 0) and np.all(z > 0):
            c4 = verify_k_diag_stability(M, 1, z / xi).passed
        inv = np.linalg.inv(np.eye(n) - M)
        c5 = bool(np.all(inv >= -1e-12 * max(1.0, np.abs(inv).max())))
        witness = {"xi": xi, "z": z, "d": z / xi if np.all(xi != 0) else None}
    except SingularMatrixError:
        c2 = c3 = c4 = c5 = False
        witness = {}
    out.update({"xi_exists": c2, "z_exists": c3, "diagonal_lyapunov": c4,
                "inverse_nonnegative": c5})
    values = list(out.values())
    witness.update(out)
    notes = [] if all(values) == any(values) else ["conditions disagree"]
    return Verdict("nonneg_schur_conditions", all(values), witness=witness,
                   tolerances={"pd": PD_TOL}, notes=notes)


def lift_dlf(A, p, k: int) -> DiagonalCertificate:
    """Lift a k=1 certificate p to order k by D = diag(p)^(k)."""
    M = as_square(A)
    p = np.ravel(np.asarray(p, dtype=float))
    base = verify_k_diag_stability(M, 1, p)
    if not base.passed:
        raise CertificateError("supplied diagonal does not certify order 1")
    d = np.diagonal(mult_compound(np.diag(p), k)).copy()
    v = verify_k_diag_stability(M, k, d)
    if not v.passed:
        raise CertificateError(f"lifted certificate fails at order {k}")
    return DiagonalCertificate(k, d, v.margin)


def cyclic_parts(A, tol: float = 0.0):
    """Return (alpha, beta, corner_sign) if A has the cyclic shape, else None.

    corner_sign is +1, -1 or 0 according to the sign of the (n, 1) entry.
    """
    M = as_square(A)
    n = M.shape[0]
    if n < 2:
        return None
    alpha = np.diagonal(M).copy()
    beta_head = np.diagonal(M, 1).copy()
    corner = M[n - 1, 0] if n > 2 else None
    mask = np.ones_like(M, dtype=bool)
    idx = np.arange(n)
    mask[idx, idx] = False
    mask[idx[:-1], idx[:-1] + 1] = False
    if n > 2:
        mask[n - 1, 0] = False
    if np.any(np.abs(M[mask]) > tol) or np.any(alpha < -tol) or np.any(beta_head < -tol):
        return None
    if n == 2:
        # the corner coincides with the sub-diagonal entry
        corner = M[1, 0]
    sign = int(np.sign(corner)) if abs(corner) > tol else 0
    beta = np.append(beta_head, abs(corner))
    return alpha, beta, sign


def classify_cyclic(A, ell: int | None = None) -> Verdict:
    """Recognise a cyclic matrix, confirm SR_ell with signature +1 and
    evaluate the Schur side of the stability equivalence."""
    M = as_square(A)
    n = M.shape[0]
    parts = cyclic_parts(M)
    if parts is None:
        return Verdict("cyclic", False, witness={"classification": "NONE"},
                       notes=["matrix does not have the cyclic shape"])
    alpha, beta, sign = parts
    parities = {1: [1], -1: [2], 0: [1, 2]}[sign]
    if ell is None:
        ell = parities[0]
    ell = int(ell)
    if not 1 <= ell <= n - 1 or (ell % 2 == 0) not in [p % 2 == 0 for p in parities]:
        raise PreconditionError(f"ell={ell} inconsistent with the corner sign of A")
    reg = classify_sign_regularity(M, max_k=ell)
    sr_ok = reg.per_order[ell] in ("SSR(+1)", "SR(+1)", "SR(0)")
    witness = {"classification": "cyclic", "ell": ell, "alpha": alpha, "beta": beta,
               "corner_sign": sign, "sr_label": reg.per_order[ell]}
    notes = []
    if ell % 2:
        sv = is_schur(M)
        witness["criterion"] = "diagonally stable iff A is Schur"
        target, order = M, 1
    else:
        target = mult_compound(M, ell)
        sv = is_schur(target)
        witness["criterion"] = f"{ell}-diagonally stable iff A^({ell}) is Schur"
        order = ell
    witness["schur"] = sv.passed
    witness["spectral_radius"] = sv.witness["spectral_radius"]
    if sv.passed:
        if np.all(target >= 0):
            cert = construct_dlf_nonneg(target)
            witness["certificate"] = DiagonalCertificate(order, cert.d, cert.margin)
        else:
            notes.append("existence of a certificate follows from the cyclic structure; "
                         "no certificate constructed for mixed-sign compounds")
    return Verdict("cyclic", bool(sr_ok and sv.passed), margin=sv.margin,
                   witness=witness, notes=notes)
