"""Command-line front end."""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import diag_stability as ds
from . import hankel as hk
from . import io as kio
from .compound import add_compound, as_square, mult_compound
from .dynamics import integrate, propagate_frame, volume_evolution
from .errors import CompoundKitError
from .geometry import volume
from .index_sets import enumerate_index_sets, label
from .measures import alpha_contraction_verdict, k_contraction_verdict, norm_tag
from .positivity import (
    is_irreducible,
    is_jacobi,
    is_metzler,
    metzler_compound_pattern,
)
from .sign_tools import classify_sign_regularity, s_minus_batch, svdp_tp_batch
from .spectral import alpha_add_compound, alpha_mult_compound, is_schur, split_alpha
from .verdict import Verdict, to_jsonable

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- output


def _num(x) -> str:
    if isinstance(x, complex) or np.iscomplexobj(x):
        z = complex(x)
        return f"{z.real:.10g}{z.imag:+.10g}j"
    return f"{float(x):.10g}"


def _table(M, row_labels, col_labels) -> str:
    M = np.atleast_2d(M)
    cells = [[""] + list(col_labels)]
    for lab, row in zip(row_labels, M):
        cells.append([lab] + [_num(v) for v in row])
    widths = [max(len(r[j]) for r in cells) for j in range(len(cells[0]))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells) + "\n"


def _complex_csv(z) -> str:
    im = kio.fmt(z.imag)
    return f"{kio.fmt(z.real)}{im if im.startswith('-') else '+' + im}j"


def _csv_table(M, row_labels, col_labels) -> str:
    M = np.atleast_2d(M)
    lines = ["," + ",".join(f'"{c}"' for c in col_labels)]
    for lab, row in zip(row_labels, M):
        if np.iscomplexobj(row):
            vals = [_complex_csv(v) for v in row]
        else:
            vals = [kio.fmt(v) for v in row]
        lines.append(f'"{lab}",' + ",".join(vals))
    return "\n".join(lines) + "\n"


def _verdict_lines(v: Verdict) -> list[str]:
    status = "PASS" if v.passed else "FAIL"
    margin = "" if v.margin is None else f" margin={_num(v.margin)}"
    out = [f"{status} {v.name}{margin}"]
    for note in v.notes:
        out.append(f"  note: {note}")
    return out


def _text_report(report: dict) -> str:
    lines = [f"command: {report['command']}"]
    for v in report.get("verdicts", []):
        lines.extend(_verdict_lines(v))
    summary = report.get("summary")
    if summary:
        for key, value in summary.items():
            lines.append(f"{key}: {json.dumps(to_jsonable(value))}")
    for note in report.get("notes", []):
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def _emit(args, report: dict, csv_text: str | None = None, text: str | None = None) -> None:
    if args.timing:
        report["wall_time_s"] = time.perf_counter() - args._start
    if args.format == "json":
        payload = dict(report)
        payload["verdicts"] = [v.to_dict() for v in report.get("verdicts", [])]
        out = json.dumps(to_jsonable(payload), indent=2) + "\n"
    elif args.format == "csv":
        if csv_text is None:
            rows = ["name,passed,margin"]
            for v in report.get("verdicts", []):
                margin = "" if v.margin is None else kio.fmt(v.margin)
                rows.append(f"{v.name},{str(bool(v.passed)).lower()},{margin}")
            csv_text = "\n".join(rows) + "\n"
        out = csv_text
    else:
        out = (text or "") + _text_report(report)
    if args.out:
        Path(args.out).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)


def _exit_code(verdicts) -> int:
    return EXIT_OK if all(v.passed for v in verdicts) else EXIT_FAIL


def _request(args) -> dict:
    skip = {"func", "_start", "out", "format", "timing"}
    return {k: v for k, v in vars(args).items() if k not in skip}


# ---------------------------------------------------------------- commands


def cmd_compound(args) -> int:
    A = kio.read_matrix(args.file)
    n, m = A.shape
    if args.alpha is not None:
        k, s = split_alpha(args.alpha, n)
        if args.additive:
            C = alpha_add_compound(A, args.alpha)
            kind = "alpha-additive"
        else:
            C = alpha_mult_compound(A, args.alpha)
            kind = "alpha-multiplicative"
        lo = [label(a) for a in enumerate_index_sets(k, n)]
        hi = [label(b) for b in enumerate_index_sets(k + 1, n)]
        rows = cols = [f"{a}⊗{b}" for a in lo for b in hi]
        order = args.alpha
        notes = ["principal branch for fractional powers"] if kind == "alpha-multiplicative" else []
    else:
        if args.k is None:
            raise UsageError("--k is required unless --alpha is given")
        k = args.k
        if args.additive:
            C = add_compound(A, k)
            kind = "additive"
        else:
            C = mult_compound(A, k)
            kind = "multiplicative"
        rows = [label(a) for a in enumerate_index_sets(k, n)]
        cols = [label(b) for b in enumerate_index_sets(k, m)]
        order = k
        notes = []
    report = {"command": "compound", "request": _request(args),
              "summary": {"kind": kind, "order": order, "shape": list(C.shape)},
              "row_index": rows, "col_index": cols, "entries": C, "notes": notes,
              "tolerances": {"abs": 1e-9, "rel": 1e-7}}
    _emit(args, report, csv_text=_csv_table(C, rows, cols), text=_table(C, rows, cols))
    return EXIT_OK


def cmd_classify(args) -> int:
    A = kio.read_matrix(args.file)
    lim = min(A.shape)
    max_k = args.max_k or lim
    reg = classify_sign_regularity(A, max_k)
    verdicts = []
    summary = {"sign_regularity": reg.to_dict()}
    if A.shape[0] == A.shape[1]:
        n = A.shape[0]
        met = is_metzler(A)
        verdicts.append(met)
        verdicts.append(is_irreducible(A))
        verdicts.append(is_jacobi(A))
        if n >= 3:
            summary["compound_metzler"] = {
                str(k): metzler_compound_pattern(n, k).matches(A) for k in range(1, n + 1)}
        cyc = ds.cyclic_parts(A)
        if cyc is not None:
            verdicts.append(ds.classify_cyclic(A))
    if args.svdp_fuzz:
        if reg.max_tp_order < lim:
            raise UsageError("--svdp-fuzz needs a matrix that classifies TP at every order")
        rng = np.random.default_rng(args.seed)
        X = rng.standard_normal((args.svdp_fuzz, A.shape[1]))
        X[rng.random(X.shape) < 0.2] = 0.0
        X = X[np.any(X != 0, axis=1)]
        ok, _ = svdp_tp_batch(A, X)
        verdicts.append(Verdict("svdp_fuzz", bool(ok.all()), witness={
            "samples": int(len(X)), "violations": int((~ok).sum()), "seed": args.seed}))
    report = {"command": "classify", "request": _request(args),
              "verdicts": verdicts, "summary": summary,
              "notes": ["classification report; exit status reflects fuzz checks only"]}
    _emit(args, report)
    fuzz = [v for v in verdicts if v.name == "svdp_fuzz"]
    return _exit_code(fuzz)


def cmd_contract(args) -> int:
    system = kio.load_system(args.system, kio.parse_params(args.param))
    tag = norm_tag(args.norm)
    times = None
    if system.tag == "LTV" and args.tmax is not None:
        times = np.linspace(0.0, args.tmax, args.samples)
    grid = args.grid if system.tag == "NONLINEAR" else None
    if args.alpha is not None:
        v = alpha_contraction_verdict(system, args.alpha, tag, args.eta, grid=grid, times=times)
    elif args.k is not None:
        v = k_contraction_verdict(system, args.k, tag, args.eta, grid=grid, times=times)
    else:
        raise UsageError("one of --k or --alpha is required")
    report = {"command": "contract", "request": _request(args), "verdicts": [v],
              "summary": {"system": system.name, "tag": system.tag, "params": system.params,
                          "worst_value": v.witness["worst_value"]},
              "notes": ["verdicts are per norm; a FAIL does not rule out other norms"]}
    if "analytic_bound" in v.witness:
        report["summary"]["analytic_bound"] = v.witness["analytic_bound"]
    _emit(args, report)
    return _exit_code([v])


def _parse_span(text: str):
    parts = [float(p) for p in text.replace(":", ",").split(",") if p.strip()]
    if len(parts) == 1:
        return 0.0, parts[0]
    if len(parts) != 2:
        raise UsageError("--tspan expects T or t0,t1")
    return parts[0], parts[1]


def _frame(spec: str, n: int) -> np.ndarray:
    if spec == "unit-square":
        return np.eye(n)[:, :2]
    if spec in ("identity", "unit-cube"):
        return np.eye(n)
    M = kio.read_matrix(spec)
    if M.shape[0] != n:
        raise UsageError(f"frame must have {n} rows")
    return M


def cmd_simulate(args) -> int:
    system = kio.load_system(args.system, kio.parse_params(args.param))
    span = _parse_span(args.tspan)
    x0 = kio.read_vector(args.x0) if args.x0 else None
    if x0 is not None and x0.size != system.n:
        raise UsageError(f"--x0 must have {system.n} entries")
    if args.frame:
        X0 = _frame(args.frame, system.n)
        if args.volume:
            times, vols = volume_evolution(system, X0, span, args.step, x_base=x0,
                                           store_every=args.every)
            header = ["t", "volume"]
            series = np.column_stack([times, vols])
            summary = {"initial_volume": volume(X0), "final_volume": float(vols[-1])}
        else:
            traj = propagate_frame(system, X0, span, args.step, x_base=x0, store_every=args.every)
            flat = traj.states.reshape(len(traj.times), -1)
            k = X0.shape[1]
            header = ["t"] + [f"x{i + 1}_{j + 1}" for i in range(system.n) for j in range(k)]
            series = np.column_stack([traj.times, flat])
            summary = {"final_frame": traj.final}
    else:
        if x0 is None:
            raise UsageError("give --x0 or --frame")
        traj = integrate(system, x0, span, args.step, store_every=args.every)
        header = ["t"] + [f"x{i + 1}" for i in range(system.n)]
        series = np.column_stack([traj.times, traj.states])
        summary = {"final_state": traj.final}
    summary["samples"] = int(series.shape[0])
    csv_text = ",".join(header) + "\n" + kio.matrix_to_csv(series)
    report = {"command": "simulate", "request": _request(args), "summary": summary,
              "series": {"header": header, "rows": series},
              "tolerances": {"h": args.step}, "notes": ["classical RK4, fixed step"]}
    if args.format == "text":
        report.pop("series")
    _emit(args, report, csv_text=csv_text)
    return EXIT_OK


def _certify(A, k):
    """Try the constructive routes for an order-k diagonal certificate."""
    C = mult_compound(A, k)
    for sign, target in ((1, C), (-1, -C)):
        if np.all(target >= 0) and is_schur(target).passed:
            cert = ds.construct_dlf_nonneg(target)
            note = "certificate from the nonnegative recipe applied to " + \
                   ("A" if k == 1 else f"A^({k})") + (" (negated)" if sign < 0 else "")
            return cert.d, note
    if k > 1:
        for target in (A, -A):
            if np.all(target >= 0) and is_schur(target).passed:
                base = ds.construct_dlf_nonneg(target)
                lifted = ds.lift_dlf(A, base.d, k)
                return lifted.d, "order-1 certificate lifted by compound products"
    return None, None


def cmd_diagstab(args) -> int:
    A = as_square(kio.read_matrix(args.file))
    k = args.k
    verdicts = []
    notes = []
    summary = {}
    if args.certificate:
        d = kio.read_vector(args.certificate)
        verdicts.append(ds.verify_k_diag_stability(A, k, d))
        summary["certificate"] = d
    else:
        d, note = _certify(A, k)
        if d is not None:
            verdicts.append(ds.verify_k_diag_stability(A, k, d))
            summary["certificate"] = d
            notes.append(note)
        else:
            verdicts.append(Verdict("k_diagonal_stability", False, witness={"k": k},
                                    notes=["no certificate found by the constructive routes; "
                                           "this is not a proof of instability"]))
    if np.all(A >= 0):
        summary["equivalent_conditions"] = ds.nonneg_schur_conditions(A).witness
    if ds.cyclic_parts(A) is not None:
        summary["cyclic"] = ds.classify_cyclic(A).to_dict()
    report = {"command": "diagstab", "request": _request(args), "verdicts": verdicts,
              "summary": summary, "notes": notes}
    _emit(args, report)
    return _exit_code(verdicts)


def cmd_hankel(args) -> int:
    obj = kio.load_hankel(args.file, args.horizon)
    v = hk.hankel_k_positive_verdict(obj, args.k)
    verdicts = [v]
    if args.fuzz and v.passed:
        g = hk.impulse_response(obj) if isinstance(obj, hk.HankelSystem) else obj
        rng = np.random.default_rng(args.seed)
        T = max(2, min(20, g.N // 4))
        j_max = max(0, min(60, g.N - T))
        U = _inputs_with_few_changes(rng, args.fuzz, T, args.k - 1)
        su, sy, ok = hk.operator_svdp_batch(g, U, j_max)
        verdicts.append(Verdict("hankel_operator_svdp", bool(ok.all()), witness={
            "samples": int(len(U)), "violations": int((~ok).sum()), "seed": args.seed,
            "input_length": T, "j_max": j_max}))
    report = {"command": "hankel", "request": _request(args), "verdicts": verdicts,
              "summary": {"orders": v.witness.get("orders"),
                          "tail_bound": v.witness.get("tail_bound")}}
    _emit(args, report)
    return _exit_code(verdicts)


def _inputs_with_few_changes(rng, count: int, T: int, max_changes: int) -> np.ndarray:
    """Random finitely supported inputs with at most max_changes sign changes."""
    U = np.empty((count, T))
    for i in range(count):
        changes = int(rng.integers(0, max(0, max_changes) + 1))
        cuts = np.sort(rng.choice(np.arange(1, T), size=min(changes, T - 1), replace=False))
        sign = rng.choice([-1.0, 1.0])
        signs = np.empty(T)
        start = 0
        for c in list(cuts) + [T]:
            signs[start:c] = sign
            sign = -sign
            start = c
        mags = rng.exponential(1.0, T) * (rng.random(T) > 0.2)
        U[i] = signs * mags
    keep = np.any(U != 0, axis=1)
    return U[keep]


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--out", help="write the report to this path instead of stdout")
    common.add_argument("--seed", type=int, default=42, help="seed for randomized checks")
    common.add_argument("--timing", action="store_true", help="include wall time in the report")

    p = argparse.ArgumentParser(prog="compoundkit",
                                description="Compound matrices and k-generalised system analyses.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compound", parents=[common], help="print a compound matrix")
    c.add_argument("file")
    c.add_argument("--k", type=int)
    kind = c.add_mutually_exclusive_group()
    kind.add_argument("--additive", action="store_true")
    kind.add_argument("--multiplicative", action="store_true")
    c.add_argument("--alpha", type=float, help="fractional order k+s; combine with --additive")
    c.set_defaults(func=cmd_compound)

    c = sub.add_parser("classify", parents=[common], help="sign-regularity and pattern report")
    c.add_argument("file")
    c.add_argument("--max-k", type=int)
    c.add_argument("--svdp-fuzz", type=int, default=0, metavar="N",
                   help="fuzz the variation-diminishing property with N random vectors")
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("contract", parents=[common], help="k- or alpha-contraction verdict")
    c.add_argument("system", help="system-spec JSON file or built-in name")
    order = c.add_mutually_exclusive_group(required=True)
    order.add_argument("--k", type=int)
    order.add_argument("--alpha", type=float)
    c.add_argument("--norm", default="L2")
    c.add_argument("--eta", type=float, default=1e-3)
    c.add_argument("--grid", type=int, default=9, help="points per state axis (nonlinear)")
    c.add_argument("--tmax", type=float, help="end of the time grid (LTV)")
    c.add_argument("--samples", type=int, default=101, help="time samples (LTV)")
    c.add_argument("--param", action="append", metavar="KEY=VALUE")
    c.set_defaults(func=cmd_contract)

    c = sub.add_parser("simulate", parents=[common], help="RK4 simulation series")
    c.add_argument("system")
    c.add_argument("--x0", help="initial state (base point for nonlinear frames)")
    c.add_argument("--frame", help="unit-square, identity or a matrix file")
    c.add_argument("--tspan", default="0,10")
    c.add_argument("--step", type=float, default=1e-3)
    c.add_argument("--every", type=int, default=100, help="store every N-th step")
    c.add_argument("--volume", action="store_true")
    c.add_argument("--param", action="append", metavar="KEY=VALUE")
    c.set_defaults(func=cmd_simulate)

    c = sub.add_parser("diagstab", parents=[common], help="k-diagonal stability")
    c.add_argument("file")
    c.add_argument("--k", type=int, default=1)
    c.add_argument("--certificate", help="file or inline list with the diagonal d")
    c.set_defaults(func=cmd_diagstab)

    c = sub.add_parser("hankel", parents=[common], help="Hankel k-positivity")
    c.add_argument("file", help="realization JSON or impulse-response CSV")
    c.add_argument("--k", type=int, default=1)
    c.add_argument("--horizon", type=int)
    c.add_argument("--fuzz", type=int, default=0, metavar="N",
                   help="operator-level check with N random inputs")
    c.set_defaults(func=cmd_hankel)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._start = time.perf_counter()
    try:
        return args.func(args)
    except (UsageError, CompoundKitError, kio.InputError, ValueError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
