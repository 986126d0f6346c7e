"""Reading and writing matrices, system specifications and Hankel inputs."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .errors import DimensionError, UnknownSystemError
from .hankel import DEFAULT_HORIZON, HankelSystem, ImpulseResponse
from .systems import LTI, LTV, NONLINEAR, SystemDef, builtin, linear, sampled_ltv


class InputError(ValueError):
    """Malformed input file or parameter."""


def fmt(x: float) -> str:
    """17 significant digits: enough for a bit-exact round trip."""
    return format(float(x) + 0.0, ".17g")  # + 0.0 maps -0.0 to 0.0


def _matrix_from_json(obj) -> np.ndarray:
    if isinstance(obj, list):
        M = np.asarray(obj, dtype=float)
        return np.atleast_2d(M)
    if not isinstance(obj, dict) or "data" not in obj:
        raise InputError('matrix JSON needs a "data" field')
    data = np.asarray(obj["data"], dtype=float)
    rows = obj.get("rows")
    cols = obj.get("cols")
    if data.ndim == 1:
        if rows is None or cols is None:
            raise InputError("flat data needs rows and cols")
        if data.size != rows * cols:
            raise InputError(f"data has {data.size} entries, expected {rows * cols}")
        data = data.reshape(rows, cols)
    if data.ndim != 2:
        raise InputError("data must be a 2-D array")
    if rows is not None and data.shape[0] != rows or cols is not None and data.shape[1] != cols:
        raise InputError(f"declared shape ({rows},{cols}) does not match data {data.shape}")
    return data


def parse_matrix_text(text: str) -> np.ndarray:
    """Whitespace- or comma-separated rows; '#' starts a comment."""
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p for p in line.replace(",", " ").replace(";", " ").split() if p]
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise InputError(f"cannot parse matrix row {line!r}") from exc
    if not rows:
        raise InputError("no matrix rows found")
    if len({len(r) for r in rows}) != 1:
        raise InputError("matrix rows have different lengths")
    return np.asarray(rows, dtype=float)


def parse_matrix(text: str) -> np.ndarray:
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        try:
            M = _matrix_from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from exc
    else:
        M = parse_matrix_text(text)
    if M.size == 0 or not np.all(np.isfinite(M)):
        raise InputError("matrix must be non-empty with finite entries")
    return M


def read_matrix(path) -> np.ndarray:
    return parse_matrix(Path(path).read_text(encoding="utf-8"))


def matrix_to_json(M) -> dict:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    return {"rows": int(M.shape[0]), "cols": int(M.shape[1]), "data": M.tolist()}


def write_matrix(M, path) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(M)) + "\n", encoding="utf-8")


def matrix_to_csv(M) -> str:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    return "\n".join(",".join(fmt(v) for v in row) for row in M) + "\n"


def read_vector(text_or_path) -> np.ndarray:
    """A vector given inline ("1,2,3") or as a file."""
    p = Path(str(text_or_path))
    text = p.read_text(encoding="utf-8") if p.is_file() else str(text_or_path)
    stripped = text.strip()
    if stripped.startswith("{") or stripped.startswith("["):
        obj = json.loads(stripped)
        if isinstance(obj, dict):
            obj = obj.get("d", obj.get("data"))
        v = np.ravel(np.asarray(obj, dtype=float))
    else:
        try:
            v = np.array([float(s) for s in stripped.replace(",", " ").split()])
        except ValueError as exc:
            raise InputError(f"cannot parse vector {text_or_path!r}") from exc
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise InputError("vector must be non-empty with finite entries")
    return v


def parse_params(items) -> dict:
    """key=value pairs; values parsed as JSON when possible."""
    out = {}
    for item in items or []:
        if "=" not in item:
            raise InputError(f"parameter {item!r} is not key=value")
        key, value = item.split("=", 1)
        try:
            out[key.strip()] = json.loads(value)
        except json.JSONDecodeError:
            out[key.strip()] = value
    return out


def system_from_spec(obj: dict) -> SystemDef:
    if not isinstance(obj, dict) or "tag" not in obj:
        raise InputError('system spec needs a "tag" field')
    tag = str(obj["tag"]).upper()
    params = obj.get("params", {}) or {}
    if "name" in obj:
        sys = builtin(obj["name"], **params)
        if sys.tag != tag:
            raise InputError(f"built-in {obj['name']!r} has tag {sys.tag}, not {tag}")
        return sys
    if tag == LTI:
        if "A" not in obj:
            raise InputError("LTI spec needs A")
        return linear(_matrix_from_json(obj["A"]), obj.get("label", "linear"))
    if tag == LTV:
        if "times" not in obj or "samples" not in obj:
            raise InputError("sampled LTV spec needs times and samples")
        mats = [_matrix_from_json(m) for m in obj["samples"]]
        return sampled_ltv(obj["times"], mats)
    if tag == NONLINEAR:
        raise InputError("nonlinear systems must name a built-in")
    raise InputError(f"unknown tag {tag!r}")


def load_system(ref: str, params: dict | None = None) -> SystemDef:
    """A JSON system-spec file, or a built-in name with parameters."""
    params = params or {}
    p = Path(ref)
    if p.is_file():
        try:
            obj = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON in {ref}: {exc}") from exc
        if params:
            obj = dict(obj)
            obj["params"] = {**(obj.get("params") or {}), **params}
        return system_from_spec(obj)
    try:
        return builtin(ref, **params)
    except UnknownSystemError:
        raise
    except TypeError as exc:
        raise InputError(f"bad parameters for {ref}: {exc}") from exc


def load_hankel(path, horizon: int | None = None):
    """Realization JSON {A, b, c[, N]} or an impulse-response CSV/text file
    holding g(1), g(2), ..."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from exc
        for key in ("A", "b", "c"):
            if key not in obj:
                raise InputError(f"realization needs {key}")
        N = horizon or obj.get("N", DEFAULT_HORIZON)
        A = _matrix_from_json(obj["A"]) if not np.isscalar(obj["A"]) else np.array([[obj["A"]]])
        try:
            return HankelSystem(A, obj["b"], obj["c"], N)
        except DimensionError as exc:
            raise InputError(str(exc)) from exc
    values = []
    for row in csv.reader(io.StringIO(text)):
        for cell in row:
            cell = cell.split("#", 1)[0].strip()
            if cell:
                for part in cell.split():
                    values.append(float(part))
    if not values:
        raise InputError("impulse response file is empty")
    g = ImpulseResponse(values)
    if horizon:
        g = ImpulseResponse(g.samples[:horizon])
    return g
